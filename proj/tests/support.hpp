#pragma once

// Shared helpers for the statistical tests: deterministic random vectors,
// unit pairs with a prescribed inner product, and running mean/variance.

#include "ceos/core.hpp"
#include "ceos/estimators.hpp"
#include "ceos/projection.hpp"

#include <cmath>

namespace testsupport {

inline ceos::Vector random_vector(int d, ceos::rng::Stream& stream, double scale = 1.0) {
    ceos::Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = static_cast<float>(scale * stream.next_gaussian());
    return v;
}

inline ceos::Vector normalized(const ceos::Vector& v) {
    const double n = std::sqrt(ceos::dot_exact(v, v));
    return Eigen::VectorXd(v.cast<double>() / n).cast<float>();
}

inline ceos::Vector random_unit(int d, ceos::rng::Stream& stream) {
    return normalized(random_vector(d, stream));
}

/// Unit pair (x, q) with inner product tau up to float rounding.
struct UnitPair {
    ceos::Vector x, q;
};

inline UnitPair make_unit_pair(int d, double tau, ceos::rng::Stream& stream) {
    const ceos::Vector q = random_unit(d, stream);
    ceos::Vector w = random_unit(d, stream);
    Eigen::VectorXd ortho = w.cast<double>() - ceos::dot_exact(w, q) * q.cast<double>();
    ortho /= std::sqrt(ortho.dot(ortho));
    Eigen::VectorXd x = tau * q.cast<double>() + std::sqrt(1.0 - tau * tau) * ortho;
    return {ceos::Vector(x.cast<float>()), q};
}

/// Welford accumulator.
struct RunningStats {
    int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double value) {
        ++count;
        const double delta = value - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (value - mean);
    }
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_error() const { return std::sqrt(variance() / static_cast<double>(count)); }
};

inline double concomitant_scale(int D) { return std::sqrt(2.0 * std::log(static_cast<double>(D))); }

/// Single-concomitant estimate of <x, q>: the x-signature value at the
/// argmax dimension of the q-signature, divided by sqrt(2 ln D).
inline double single_concomitant_estimate(const ceos::Vector& x_sig, const ceos::Vector& q_sig) {
    const ceos::ExtremeDims dims = ceos::extreme_dims(q_sig, 1);
    return static_cast<double>(x_sig[dims.max_dims[0]]) /
           concomitant_scale(static_cast<int>(q_sig.size()));
}

}  // namespace testsupport
