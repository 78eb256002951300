#pragma once

#include "ceos/core.hpp"

#include <array>

namespace ceos {

enum class RotationKind : uint8_t { gaussian = 0, spinner = 1 };

/// Seedable description of a random rotation R: either an explicit D x d
/// Gaussian matrix, or three ±1 diagonals for the fast-Hadamard simulation
/// x -> H D3 H D2 H D1 x. Immutable after construction; identical
/// (kind, seed, d, requested_D) always reproduce identical contents.
struct RotationSpec {
    RotationKind kind = RotationKind::gaussian;
    uint64_t seed = 0;
    int d = 0;  // source dimension
    int D = 0;  // target dimension; power of two for spinner
    Matrix gaussian;                    // D x d, gaussian kind only
    std::array<Vector, 3> sign_diags;   // length D each, spinner kind only
};

/// Signature matrix X' = R X, one signature per column, plus the rotation
/// that produced it.
struct ProjectedMatrix {
    int D = 0;
    int n = 0;
    Matrix values;  // D x n
    RotationSpec rotation;
};

/// Dimensions of the s0 largest signature entries (descending value) and
/// the s0 smallest (ascending value). Disjoint by construction.
struct ExtremeDims {
    std::vector<int32_t> max_dims;  // I
    std::vector<int32_t> min_dims;  // J
    int s0() const { return static_cast<int>(max_dims.size()); }
};

/// Builds a rotation. Spinner rounds D up to the next power of two
/// >= max(d, requested_D) and pads inputs with zeros; gaussian uses
/// requested_D exactly.
RotationSpec make_rotation(RotationKind kind, uint64_t seed, int d, int requested_D);

/// In-place orthonormal Walsh-Hadamard transform (scaled by 1/sqrt(n), so
/// the transform is an involution). Length must be a power of two.
void fwht(std::span<double> v);

/// Rotates one vector; returns the length-D signature.
Vector apply(const RotationSpec& spec, const Vector& x);

/// Rotates every column of the set. Columns are independent and computed
/// in parallel under the global thread cap.
ProjectedMatrix project_all(const RotationSpec& spec, const VectorSet& set);

/// Extracts the extreme dimensions of a signature. Requires 2*s0 <= D.
/// Ties break toward the lower dimension index; under exact value ties the
/// max side claims a dimension first so the two sets stay disjoint.
ExtremeDims extreme_dims(const Vector& signature, int s0);

inline bool is_power_of_two(int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace ceos
