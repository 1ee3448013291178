#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace rb {

using Vector = std::vector<double>;

// Dense row-major matrix. Problem sizes here are tiny (d <= ~20 states,
// LP bases a few hundred rows), so no sparse machinery.
struct Matrix {
    int rows = 0;
    int cols = 0;
    Vector data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    std::span<double> row(int r) {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
    std::span<const double> row(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool operator==(const Matrix&) const = default;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

inline double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

inline double max_abs(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// Sample mean with a 95% normal confidence interval.
struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
    long n = 0;
};

inline MeanCi mean_ci(std::span<const double> xs) {
    MeanCi out;
    out.n = static_cast<long>(xs.size());
    if (out.n == 0) return out;
    out.mean = sum(xs) / static_cast<double>(out.n);
    if (out.n < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
    out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(out.n));
    return out;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic 64-bit mix of (seed, salt) for deriving sub-seeds.
inline std::uint64_t splitmix_hash(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64(s);
}

// Independent deterministic engine per (seed, stream): replications, experiment
// cells and model batches each get their own stream index.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + stream * 0xd1342543de82ef95ULL);
    std::uint64_t w0 = splitmix64(s), w1 = splitmix64(s), w2 = splitmix64(s), w3 = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
                      static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32),
                      static_cast<std::uint32_t>(w2), static_cast<std::uint32_t>(w2 >> 32),
                      static_cast<std::uint32_t>(w3), static_cast<std::uint32_t>(w3 >> 32)};
    return std::mt19937_64(seq);
}

// Uniform point on the probability simplex (Dirichlet(1,...,1)).
inline Vector uniform_simplex_point(std::mt19937_64& rng, int d) {
    std::exponential_distribution<double> exp1(1.0);
    Vector v(d);
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
        v[i] = exp1(rng);
        total += v[i];
    }
    for (int i = 0; i < d; ++i) v[i] /= total;
    return v;
}

// Adds a multinomial(count, p) draw into out. For small counts each trial is a
// categorical draw; otherwise conditional binomials category by category. Both
// realize the same distribution.
inline void sample_multinomial(std::mt19937_64& rng, long count, std::span<const double> p,
                               std::span<long> out) {
    const int d = static_cast<int>(p.size());
    if (count <= 0) return;
    if (count <= 16) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (long k = 0; k < count; ++k) {
            double u = unif(rng);
            double acc = 0.0;
            int pick = d - 1;
            for (int i = 0; i < d; ++i) {
                acc += p[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            ++out[pick];
        }
        return;
    }
    long left = count;
    double p_left = 1.0;
    for (int i = 0; i + 1 < d && left > 0; ++i) {
        if (p[i] <= 0.0) continue;
        double q = std::min(1.0, p[i] / std::max(p_left, 1e-300));
        long k;
        if (q >= 1.0) {
            k = left;
        } else {
            std::binomial_distribution<long> bin(left, q);
            k = bin(rng);
        }
        out[i] += k;
        left -= k;
        p_left -= p[i];
    }
    if (left > 0) out[d - 1] += left;
}

// FNV-1a content fingerprint used in experiment output headers.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex_u64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

// Runs body(0..n-1) on a small worker pool. Work item i must depend only on i
// (callers derive per-item RNG streams), so the schedule never affects results.
inline void parallel_for(long n, const std::function<void(long)>& body, int threads = 0) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= n) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    int k = static_cast<int>(std::min<long>(threads, n));
    pool.reserve(k);
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace rb
