#include "ceos/projection.hpp"

#include <algorithm>
#include <numeric>

namespace ceos {

namespace {

int next_power_of_two(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Spinner pipeline on a double workspace: pad, then three rounds of
// sign-diagonal multiply + Hadamard. Rounded to float once at the end so
// the three isometries keep full precision.
void apply_spinner(const RotationSpec& spec, const Vector& x, float* out) {
    std::vector<double> buf(static_cast<size_t>(spec.D), 0.0);
    for (int i = 0; i < spec.d; ++i) buf[static_cast<size_t>(i)] = static_cast<double>(x[i]);
    for (int round = 0; round < 3; ++round) {
        const Vector& diag = spec.sign_diags[static_cast<size_t>(round)];
        for (int i = 0; i < spec.D; ++i) buf[static_cast<size_t>(i)] *= static_cast<double>(diag[i]);
        fwht(buf);
    }
    for (int i = 0; i < spec.D; ++i) out[i] = static_cast<float>(buf[static_cast<size_t>(i)]);
}

}  // namespace

RotationSpec make_rotation(RotationKind kind, uint64_t seed, int d, int requested_D) {
    if (d <= 0) throw ParamError("make_rotation: d must be positive");
    if (requested_D <= 0) throw ParamError("make_rotation: requested_D must be positive");

    RotationSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    spec.d = d;

    if (kind == RotationKind::gaussian) {
        spec.D = requested_D;
        spec.gaussian.resize(spec.D, d);
        rng::Stream stream(rng::mix(seed, rng::kGaussianTag));
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < spec.D; ++i)
                spec.gaussian(i, j) = static_cast<float>(stream.next_gaussian());
    } else {
        spec.D = next_power_of_two(std::max(d, requested_D));
        for (int round = 0; round < 3; ++round) {
            Vector& diag = spec.sign_diags[static_cast<size_t>(round)];
            diag.resize(spec.D);
            for (int i = 0; i < spec.D; ++i)
                diag[i] = rng::sign_at(seed, static_cast<uint64_t>(round), static_cast<uint64_t>(i));
        }
    }
    return spec;
}

void fwht(std::span<double> v) {
    const size_t n = v.size();
    if (!is_power_of_two(static_cast<int64_t>(n)))
        throw ParamError("fwht: length must be a power of two");
    for (size_t len = 1; len < n; len <<= 1) {
        for (size_t i = 0; i < n; i += len << 1) {
            for (size_t j = i; j < i + len; ++j) {
                const double a = v[j];
                const double b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (double& x : v) x *= scale;
}

Vector apply(const RotationSpec& spec, const Vector& x) {
    if (static_cast<int>(x.size()) != spec.d)
        throw ParamError("apply: vector length " + std::to_string(x.size()) +
                         " does not match rotation d=" + std::to_string(spec.d));
    Vector out(spec.D);
    if (spec.kind == RotationKind::gaussian) {
        out.noalias() = spec.gaussian * x;
    } else {
        apply_spinner(spec, x, out.data());
    }
    return out;
}

ProjectedMatrix project_all(const RotationSpec& spec, const VectorSet& set) {
    if (set.dim() != spec.d)
        throw ParamError("project_all: set dimension does not match rotation");
    ProjectedMatrix pm;
    pm.D = spec.D;
    pm.n = set.size();
    pm.rotation = spec;
    pm.values.resize(spec.D, set.size());
    parallel_for(set.size(), [&](int64_t j) {
        pm.values.col(j) = apply(spec, set.col(static_cast<int>(j)));
    });
    return pm;
}

ExtremeDims extreme_dims(const Vector& signature, int s0) {
    const int D = static_cast<int>(signature.size());
    if (s0 < 1) throw ParamError("extreme_dims: s0 must be >= 1");
    if (2 * s0 > D) throw ParamError("extreme_dims: 2*s0 exceeds D");

    std::vector<int32_t> order(static_cast<size_t>(D));
    std::iota(order.begin(), order.end(), 0);

    ExtremeDims dims;
    dims.max_dims.resize(static_cast<size_t>(s0));
    std::partial_sort(order.begin(), order.begin() + s0, order.end(), [&](int32_t a, int32_t b) {
        if (signature[a] != signature[b]) return signature[a] > signature[b];
        return a < b;
    });
    std::copy(order.begin(), order.begin() + s0, dims.max_dims.begin());

    std::vector<char> taken(static_cast<size_t>(D), 0);
    for (int32_t i : dims.max_dims) taken[static_cast<size_t>(i)] = 1;

    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
        if (signature[a] != signature[b]) return signature[a] < signature[b];
        return a < b;
    });
    dims.min_dims.reserve(static_cast<size_t>(s0));
    for (int32_t i : order) {
        if (taken[static_cast<size_t>(i)]) continue;
        dims.min_dims.push_back(i);
        if (static_cast<int>(dims.min_dims.size()) == s0) break;
    }
    return dims;
}

}  // namespace ceos
