#include "rb/model.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace rb {

namespace {

constexpr double kStochasticTol = 1e-12;

void check_matrix_list(ValidationReport& report, const std::vector<Matrix>& ms, int d,
                       const char* label) {
    for (std::size_t k = 0; k < ms.size(); ++k) {
        const Matrix& m = ms[k];
        if (m.rows != d || m.cols != d) {
            report.issues.push_back({"kernel-shape", std::string(label) + " entry " +
                                                         std::to_string(k) + " is not d x d"});
            continue;
        }
        for (int r = 0; r < d; ++r) {
            double row_sum = 0.0;
            for (int c = 0; c < d; ++c) {
                double v = m(r, c);
                if (v < 0.0 || v > 1.0) {
                    report.issues.push_back(
                        {"kernel-entry-range", std::string(label) + " row " + std::to_string(r) +
                                                   " has entry outside [0,1]"});
                }
                row_sum += v;
            }
            if (std::abs(row_sum - 1.0) > kStochasticTol) {
                report.issues.push_back({"row-stochasticity",
                                         std::string(label) + " epoch " + std::to_string(k) +
                                             " row " + std::to_string(r) + " sums to " +
                                             std::to_string(row_sum)});
            }
        }
    }
}

}  // namespace

ValidationReport validate(const RBModel& model) {
    ValidationReport report;
    if (model.d <= 0) {
        report.issues.push_back({"state-count", "d must be positive"});
        return report;
    }
    if (!(model.alpha > 0.0 && model.alpha < 1.0))
        report.issues.push_back({"budget fraction", "alpha must lie strictly in (0,1)"});
    if (model.horizon.is_finite() && model.horizon.T <= 0)
        report.issues.push_back({"horizon", "finite horizon must be positive"});

    auto size_ok = [&](std::size_t k) {
        return k == 1 || (model.horizon.is_finite() && k == static_cast<std::size_t>(model.horizon.T));
    };
    if (model.p0.empty() || !size_ok(model.p0.size()))
        report.issues.push_back({"per-epoch-arity", "p0 must have 1 or T entries"});
    if (model.p1.empty() || !size_ok(model.p1.size()))
        report.issues.push_back({"per-epoch-arity", "p1 must have 1 or T entries"});
    if (model.r0.empty() || !size_ok(model.r0.size()))
        report.issues.push_back({"per-epoch-arity", "r0 must have 1 or T entries"});
    if (model.r1.empty() || !size_ok(model.r1.size()))
        report.issues.push_back({"per-epoch-arity", "r1 must have 1 or T entries"});
    if (!report.ok()) return report;

    check_matrix_list(report, model.p0, model.d, "p0");
    check_matrix_list(report, model.p1, model.d, "p1");
    for (const auto& r : model.r0)
        if (static_cast<int>(r.size()) != model.d)
            report.issues.push_back({"reward-shape", "r0 entry has wrong length"});
    for (const auto& r : model.r1)
        if (static_cast<int>(r.size()) != model.d)
            report.issues.push_back({"reward-shape", "r1 entry has wrong length"});

    if (static_cast<int>(model.m0.size()) != model.d) {
        report.issues.push_back({"initial-distribution", "m0 has wrong length"});
    } else {
        double total = 0.0;
        for (double v : model.m0) {
            if (v < 0.0)
                report.issues.push_back({"initial-distribution", "m0 has a negative entry"});
            total += v;
        }
        if (std::abs(total - 1.0) > kStochasticTol)
            report.issues.push_back(
                {"initial-distribution", "m0 sums to " + std::to_string(total)});
    }
    return report;
}

RBModel random_model(int d, int t, std::uint64_t seed, double alpha) {
    if (d < 2) throw std::invalid_argument("random_model: d must be at least 2");
    if (t < 1) throw std::invalid_argument("random_model: horizon must be positive");
    auto rng = make_rng(seed);
    RBModel model;
    model.d = d;
    model.alpha = alpha;
    model.horizon = Horizon::finite(t);
    Matrix k0(d, d), k1(d, d);
    for (int s = 0; s < d; ++s) {
        Vector row = uniform_simplex_point(rng, d);
        for (int c = 0; c < d; ++c) k0(s, c) = row[c];
    }
    for (int s = 0; s < d; ++s) {
        Vector row = uniform_simplex_point(rng, d);
        for (int c = 0; c < d; ++c) k1(s, c) = row[c];
    }
    model.p0 = {std::move(k0)};
    model.p1 = {std::move(k1)};
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector rw0(d), rw1(d);
    for (int s = 0; s < d; ++s) rw0[s] = unif(rng);
    for (int s = 0; s < d; ++s) rw1[s] = unif(rng);
    model.r0 = {std::move(rw0)};
    model.r1 = {std::move(rw1)};
    model.m0.assign(d, 1.0 / d);
    return model;
}

DegenerateExample degenerate_example(double p1, double p2, double q1, double q2) {
    for (double v : {p1, p2, q1, q2})
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("degenerate_example: parameters must lie in [0,1]");
    RBModel model;
    model.d = 2;
    model.alpha = 0.5;
    model.horizon = Horizon::finite(2);
    Matrix active(2, 2), passive(2, 2);
    active(0, 0) = p1;
    active(0, 1) = 1.0 - p1;
    active(1, 0) = p2;
    active(1, 1) = 1.0 - p2;
    passive(0, 0) = q1;
    passive(0, 1) = 1.0 - q1;
    passive(1, 0) = q2;
    passive(1, 1) = 1.0 - q2;
    model.p1 = {std::move(active)};
    model.p0 = {std::move(passive)};
    model.r0 = {Vector{0.0, 0.0}};
    model.r1 = {Vector{1.0, 0.0}};
    model.m0 = {0.5, 0.5};
    return {std::move(model), q1 + p2 > 1.0 + p1 + q2};
}

std::vector<std::pair<int, int>> screening_states(int t) {
    std::vector<std::pair<int, int>> states;
    for (int total = 2; total <= t + 1; ++total)
        for (int a = 1; a < total; ++a) states.emplace_back(a, total - a);
    return states;
}

int screening_state_index(int t, int a, int b) {
    auto states = screening_states(t);
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].first == a && states[i].second == b) return static_cast<int>(i);
    throw std::out_of_range("screening_state_index: state not in enumeration");
}

RBModel screening_model(int t) {
    if (t < 2) throw std::invalid_argument("screening_model: horizon must be at least 2");
    auto states = screening_states(t);
    const int d = static_cast<int>(states.size());

    Matrix interview(d, d);
    for (int i = 0; i < d; ++i) {
        auto [a, b] = states[i];
        if (a + b == t + 1) {
            // cap states are unreachable before the final epoch; keep rows stochastic
            interview(i, i) = 1.0;
            continue;
        }
        double up = static_cast<double>(a) / (a + b);
        interview(i, screening_state_index(t, a + 1, b)) = up;
        interview(i, screening_state_index(t, a, b + 1)) = 1.0 - up;
    }

    RBModel model;
    model.d = d;
    model.alpha = 0.25;
    model.horizon = Horizon::finite(t);
    model.p0 = {Matrix::identity(d)};
    model.p1.assign(t, interview);
    model.p1.back() = Matrix::identity(d);  // final-epoch transitions never matter
    model.r0 = {Vector(d, 0.0)};
    model.r1.assign(t, Vector(d, 0.0));
    for (int i = 0; i < d; ++i) {
        auto [a, b] = states[i];
        model.r1.back()[i] = static_cast<double>(a) / (a + b);
    }
    model.m0.assign(d, 0.0);
    model.m0[screening_state_index(t, 1, 1)] = 1.0;
    return model;
}

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    int rows = static_cast<int>(j.size());
    int cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

bool is_matrix(const json& j) {
    return j.is_array() && !j.empty() && j.at(0).is_array() && !j.at(0).empty() &&
           j.at(0).at(0).is_number();
}

json kernels_to_json(const std::vector<Matrix>& ms) {
    if (ms.size() == 1) return matrix_to_json(ms[0]);
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(matrix_to_json(m));
    return arr;
}

std::vector<Matrix> kernels_from_json(const json& j) {
    std::vector<Matrix> out;
    if (is_matrix(j)) {
        out.push_back(matrix_from_json(j));
    } else {
        for (const auto& e : j) out.push_back(matrix_from_json(e));
    }
    return out;
}

json rewards_to_json(const std::vector<Vector>& rs) {
    auto vec = [](const Vector& v) { return json(v); };
    if (rs.size() == 1) return vec(rs[0]);
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(vec(r));
    return arr;
}

std::vector<Vector> rewards_from_json(const json& j) {
    std::vector<Vector> out;
    if (j.is_array() && !j.empty() && j.at(0).is_number()) {
        out.push_back(j.get<Vector>());
    } else {
        for (const auto& e : j) out.push_back(e.get<Vector>());
    }
    return out;
}

}  // namespace

std::string model_to_json(const RBModel& model) {
    json j;
    j["d"] = model.d;
    j["alpha"] = model.alpha;
    if (model.horizon.is_finite())
        j["horizon"] = model.horizon.T;
    else
        j["horizon"] = "infinite";
    j["p0"] = kernels_to_json(model.p0);
    j["p1"] = kernels_to_json(model.p1);
    j["r0"] = rewards_to_json(model.r0);
    j["r1"] = rewards_to_json(model.r1);
    j["m0"] = json(model.m0);
    return j.dump(2);
}

RBModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    RBModel model;
    model.d = j.at("d").get<int>();
    model.alpha = j.at("alpha").get<double>();
    if (j.at("horizon").is_string()) {
        if (j.at("horizon").get<std::string>() != "infinite")
            throw std::invalid_argument("model_from_json: horizon must be an integer or \"infinite\"");
        model.horizon = Horizon::forever();
    } else {
        model.horizon = Horizon::finite(j.at("horizon").get<int>());
    }
    model.p0 = kernels_from_json(j.at("p0"));
    model.p1 = kernels_from_json(j.at("p1"));
    model.r0 = rewards_from_json(j.at("r0"));
    model.r1 = rewards_from_json(j.at("r1"));
    model.m0 = j.at("m0").get<Vector>();
    return model;
}

RBModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

void save_model(const RBModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_json(model) << '\n';
}

ArmPopulationState apportion(const Vector& m, long n) {
    const int d = static_cast<int>(m.size());
    ArmPopulationState pop;
    pop.n = n;
    pop.counts.assign(d, 0);
    std::vector<std::pair<double, int>> remainders(d);
    long assigned = 0;
    for (int s = 0; s < d; ++s) {
        double exact = m[s] * static_cast<double>(n);
        long base = static_cast<long>(std::floor(exact + 1e-12));
        pop.counts[s] = base;
        assigned += base;
        remainders[s] = {exact - static_cast<double>(base), s};
    }
    // largest remainder first; ties by lower state id
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (long k = 0; k < n - assigned; ++k) ++pop.counts[remainders[k % d].second];
    return pop;
}

}  // namespace rb
