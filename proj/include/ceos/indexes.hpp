#pragma once

#include "ceos/core.hpp"
#include "ceos/estimators.hpp"
#include "ceos/projection.hpp"

#include <map>

namespace ceos {

/// Per-dimension top-b lists of the points with the largest projected
/// values. With min_lists populated the index also answers the two-sided
/// ("2CEOs") query that probes the minimum dimension's mirrored list.
struct OneCeosIndex {
    int D = 0;
    int n = 0;
    int b = 0;
    int list_len = 0;                // min(b, n)
    bool two_sided = false;
    std::vector<int32_t> max_lists;  // D * list_len, row j block = L_j descending
    std::vector<int32_t> min_lists;  // same shape, ascending values; empty unless two_sided

    std::span<const int32_t> max_list(int dim) const {
        return {max_lists.data() + static_cast<size_t>(dim) * list_len,
                static_cast<size_t>(list_len)};
    }
    std::span<const int32_t> min_list(int dim) const {
        return {min_lists.data() + static_cast<size_t>(dim) * list_len,
                static_cast<size_t>(list_len)};
    }
};

/// Fully precomputed sCEOs index: one top-b list per ordered pair of
/// disjoint s0-subsets (I, J) of [D]. Exponential in s0; guarded by a
/// list-count limit at build time.
struct SceosFullIndex {
    int D = 0;
    int n = 0;
    int s0 = 0;
    int b = 0;
    // Key = I sorted ascending followed by J sorted ascending.
    std::map<std::vector<int32_t>, std::vector<int32_t>> lists;
};

/// sCEOs-TA index: every dimension's (value, id) pairs sorted descending,
/// plus the projected matrix for random access during the TA walk.
struct SceosTaIndex {
    int D = 0;
    int n = 0;
    std::vector<int32_t> sorted_ids;  // D * n, row j block sorted by value desc
    std::vector<float> sorted_values;
    ProjectedMatrix projected;

    std::span<const int32_t> ids(int dim) const {
        return {sorted_ids.data() + static_cast<size_t>(dim) * n, static_cast<size_t>(n)};
    }
    std::span<const float> values(int dim) const {
        return {sorted_values.data() + static_cast<size_t>(dim) * n, static_cast<size_t>(n)};
    }
};

/// coCEOs index: per dimension, the top-m (value, id) entries by largest
/// value (descending) and by smallest value (ascending).
struct CoCeosIndex {
    int D = 0;
    int n = 0;
    int m = 0;
    int list_len = 0;  // min(m, n)
    std::vector<int32_t> max_ids;  // D * list_len
    std::vector<float> max_values;
    std::vector<int32_t> min_ids;
    std::vector<float> min_values;
};

OneCeosIndex build_1ceos(const ProjectedMatrix& pm, int b, bool two_sided = false);

/// Rotates the query, probes the list of the argmax dimension (plus the
/// argmin dimension's mirrored list when two_sided) and reranks exactly.
QueryResult query_1ceos(const OneCeosIndex& index, const VectorSet& data, const RotationSpec& rot,
                        const Vector& query, int k, bool two_sided = false);

/// Enumerates all C(D,s0)*C(D-s0,s0) lists; refuses to build more than
/// `limit` of them.
SceosFullIndex build_sceos_full(const ProjectedMatrix& pm, int s0, int b,
                                uint64_t limit = 1'000'000);

QueryResult query_sceos_full(const SceosFullIndex& index, const VectorSet& data,
                             const RotationSpec& rot, const Vector& query, int k);

/// sCEOs-Est as a full query procedure: linear estimate scan via
/// sceos_est_topb, then exact rerank. The projected matrix is the index.
QueryResult query_sceos_est(const ProjectedMatrix& pm, const VectorSet& data,
                            const RotationSpec& rot, const Vector& query, int s0, int b, int k);

SceosTaIndex build_sceos_ta(ProjectedMatrix pm);

/// Fagin's threshold algorithm over the s = 2*s0 signed streams given by
/// the extreme dimensions of the rotated query. Produces exactly the
/// sceos_est_topb candidate set, then reranks.
QueryResult query_sceos_ta(const SceosTaIndex& index, const VectorSet& data,
                           const RotationSpec& rot, const Vector& query, int s0, int b, int k);

CoCeosIndex build_coceos(const ProjectedMatrix& pm, int m);

/// Budgeted partial-estimate query: scans min(B/s', m) entries on each of
/// s' extreme dimensions (s'/2 max, s'/2 min), accumulates signed values
/// per id in a hash histogram, reranks the top-b accumulated ids.
QueryResult query_coceos(const CoCeosIndex& index, const VectorSet& data, const RotationSpec& rot,
                         const Vector& query, int sprime, int64_t budget, int b, int k);

/// Exact rerank of distinct candidate ids: top-k by true inner product,
/// descending, ties toward the lower id. k larger than the candidate count
/// returns all candidates ranked.
QueryResult rerank(std::span<const int32_t> candidates, const VectorSet& data, const Vector& query,
                   int k);

/// Number of (I, J) lists a full sCEOs index needs, saturating at
/// uint64 max; `approx` receives the value in floating form for messages.
uint64_t sceos_full_list_count(int D, int s0, long double* approx = nullptr);

}  // namespace ceos
