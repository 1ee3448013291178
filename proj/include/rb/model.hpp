#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rb/math.hpp"

namespace rb {

struct Horizon {
    bool infinite = false;
    int T = 0;  // decision epochs 0..T-1 when finite

    static Horizon finite(int t) { return Horizon{false, t}; }
    static Horizon forever() { return Horizon{true, 0}; }
    bool is_finite() const { return !infinite; }
    bool operator==(const Horizon&) const = default;
};

// A restless-bandit instance: d arm states, activation budget fraction alpha,
// passive/active kernels and rewards, initial distribution. Kernels and rewards
// are either a single entry (used for every epoch) or one entry per epoch
// (finite horizon only). Immutable after construction; shareable across threads.
struct RBModel {
    int d = 0;
    double alpha = 0.0;
    Horizon horizon;
    std::vector<Matrix> p0, p1;  // size 1 or horizon.T
    std::vector<Vector> r0, r1;  // size 1 or horizon.T
    Vector m0;

    const Matrix& kernel(int action, int t) const {
        const auto& ks = action == 0 ? p0 : p1;
        return ks.size() == 1 ? ks[0] : ks[static_cast<std::size_t>(t)];
    }
    const Vector& reward(int action, int t) const {
        const auto& rs = action == 0 ? r0 : r1;
        return rs.size() == 1 ? rs[0] : rs[static_cast<std::size_t>(t)];
    }
    bool stationary() const {
        return p0.size() == 1 && p1.size() == 1 && r0.size() == 1 && r1.size() == 1;
    }

    bool operator==(const RBModel&) const = default;
};

struct ValidationIssue {
    std::string invariant;  // short name, e.g. "row-stochasticity"
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    const ValidationIssue* first() const { return issues.empty() ? nullptr : &issues.front(); }
};

ValidationReport validate(const RBModel& model);

// Random instance: kernel rows uniform on the simplex, rewards iid U[0,1],
// uniform initial distribution. Deterministic in seed.
RBModel random_model(int d, int t, std::uint64_t seed, double alpha = 0.5);

// Two-state horizon-2 instance whose LP optimum randomizes both states at t=0.
// condition_holds reports q1 + p2 > 1 + p1 + q2.
struct DegenerateExample {
    RBModel model;
    bool condition_holds = false;
};
DegenerateExample degenerate_example(double p1, double p2, double q1, double q2);

// Beta-Bernoulli applicant screening: states are posterior pairs (a,b) with
// a,b >= 1 and a+b <= t+1 in the canonical order below; interviews move
// (a,b) -> (a+1,b) w.p. a/(a+b), else (a,b+1); only the final epoch pays, with
// active reward a/(a+b). alpha = 0.25.
RBModel screening_model(int t);

// Canonical screening state order: ascending (a+b), then ascending a.
std::vector<std::pair<int, int>> screening_states(int t);
int screening_state_index(int t, int a, int b);

// JSON model file round trip (format documented in docs/formats.md).
std::string model_to_json(const RBModel& model);
RBModel model_from_json(const std::string& text);
RBModel load_model(const std::string& path);
void save_model(const RBModel& model, const std::string& path);

// Integer arm counts per state; counts/n is the empirical measure.
struct ArmPopulationState {
    std::vector<long> counts;
    long n = 0;

    Vector measure() const {
        Vector m(counts.size());
        for (std::size_t s = 0; s < counts.size(); ++s)
            m[s] = static_cast<double>(counts[s]) / static_cast<double>(n);
        return m;
    }
};

// Deterministic largest-remainder apportionment of n arms to the distribution m.
ArmPopulationState apportion(const Vector& m, long n);

// Active/passive mass per state. For a distribution-level vector the 2d entries
// sum to 1; state marginal is y1[s] + y0[s].
struct OccupationVector {
    Vector y1, y0;

    OccupationVector() = default;
    explicit OccupationVector(int d) : y1(d, 0.0), y0(d, 0.0) {}

    int d() const { return static_cast<int>(y1.size()); }
    double total_mass() const { return sum(y1) + sum(y0); }
    Vector marginal() const {
        Vector m(y1.size());
        for (std::size_t s = 0; s < y1.size(); ++s) m[s] = y1[s] + y0[s];
        return m;
    }
    bool operator==(const OccupationVector&) const = default;
};

}  // namespace rb
