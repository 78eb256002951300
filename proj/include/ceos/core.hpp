#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ceos {

using Matrix = Eigen::MatrixXf;  // column-major
using Vector = Eigen::VectorXf;

// Error taxonomy shared with the CLI exit codes: ParamError -> 2,
// FormatError -> 3, CapacityError -> 4.
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense set of d-dimensional points, one point per column.
struct VectorSet {
    Matrix points;  // d x n

    VectorSet() = default;
    explicit VectorSet(Matrix m) : points(std::move(m)) {}

    int dim() const { return static_cast<int>(points.rows()); }
    int size() const { return static_cast<int>(points.cols()); }
    auto col(int j) const { return points.col(j); }
};

/// Ranked answer of one query: (point id, exact inner product) descending,
/// plus per-phase timings and probe statistics.
struct QueryResult {
    std::vector<std::pair<int32_t, double>> entries;
    int64_t candidates_examined = 0;
    int64_t sorted_accesses = 0;   // TA only
    int64_t effective_budget = 0;  // coCEOs only (after the per-list clamp)
    struct Timings {
        double rotation_s = 0.0;
        double probe_s = 0.0;
        double rerank_s = 0.0;
        double total() const { return rotation_s + probe_s + rerank_s; }
    } timings;
};

// Inner product with double accumulation. Float products are exact in
// double, so two independently written left-to-right loops agree
// bit-for-bit; every exact-distance path in the library goes through here.
inline double dot_exact(const float* a, const float* b, int d) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

inline double dot_exact(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw ParamError("dot_exact: size mismatch");
    return dot_exact(a.data(), b.data(), static_cast<int>(a.size()));
}

// (id, score) ordering used everywhere a top-k is selected: higher score
// first, ties resolved toward the lower id.
inline bool better_scored(double score_a, int32_t id_a, double score_b, int32_t id_b) {
    if (score_a != score_b) return score_a > score_b;
    return id_a < id_b;
}

namespace rng {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// Named sub-streams so one user-facing seed drives independent generators.
inline constexpr uint64_t kGaussianTag = 0x43454f535f475253ULL;
inline constexpr uint64_t kSignTag = 0x43454f535f53474eULL;
inline constexpr uint64_t kSimHashTag = 0x43454f535f534948ULL;
inline constexpr uint64_t kSynthTag = 0x43454f535f53594eULL;

// Stateless ±1 draw addressed by (seed, round, position); lets sign
// diagonals be generated in any order.
inline float sign_at(uint64_t seed, uint64_t round, uint64_t position) {
    uint64_t s = mix(mix(seed, kSignTag + round), position);
    return (splitmix64(s) >> 63) ? 1.0f : -1.0f;
}

/// Deterministic uniform/Gaussian stream. Distributions are implemented
/// here rather than taken from <random> so that identical seeds reproduce
/// identical values on any platform.
class Stream {
public:
    explicit Stream(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in (0, 1).
    double next_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via the Marsaglia polar method.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rng

struct StopWatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    void reset() { t0 = std::chrono::steady_clock::now(); }
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

/// FNV-1a over a byte range; used for file checksums and immutability checks.
inline uint64_t fnv1a(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Global worker cap for the parallel build/query loops (1 = serial).
void set_num_threads(int n);
int num_threads();

/// Runs fn(i) for i in [0, count). Iterations touch disjoint state, so
/// results are identical for any thread count.
void parallel_for(int64_t count, const std::function<void(int64_t)>& fn);

}  // namespace ceos
