#include "ceos/indexes.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

namespace ceos {

namespace {

// Argsort of one projected dimension by (value desc, id asc). All
// per-dimension lists in every index derive from this one ordering.
std::vector<int32_t> sort_dimension(const ProjectedMatrix& pm, int dim) {
    std::vector<int32_t> order(static_cast<size_t>(pm.n));
    std::iota(order.begin(), order.end(), 0);
    const auto row = pm.values.row(dim);
    std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
        const float va = row[a];
        const float vb = row[b];
        if (va != vb) return va > vb;
        return a < b;
    });
    return order;
}

std::vector<int32_t> candidate_ids(std::vector<std::pair<int32_t, double>> ranked) {
    std::vector<int32_t> ids(ranked.size());
    for (size_t i = 0; i < ranked.size(); ++i) ids[i] = ranked[i].first;
    return ids;
}

}  // namespace

uint64_t sceos_full_list_count(int D, int s0, long double* approx) {
    auto binom = [](int n, int r, long double& ap) -> uint64_t {
        ap = 1.0L;
        if (r < 0 || r > n) {
            ap = 0.0L;
            return 0;
        }
        uint64_t value = 1;
        bool saturated = false;
        for (int i = 1; i <= r; ++i) {
            ap = ap * (n - r + i) / i;
            if (!saturated) {
                const uint64_t num = value * static_cast<uint64_t>(n - r + i);
                if (num / static_cast<uint64_t>(n - r + i) != value)
                    saturated = true;
                else
                    value = num / static_cast<uint64_t>(i);
            }
        }
        return saturated ? UINT64_MAX : value;
    };
    long double a1 = 0.0L, a2 = 0.0L;
    const uint64_t c1 = binom(D, s0, a1);
    const uint64_t c2 = binom(D - s0, s0, a2);
    if (approx) *approx = a1 * a2;
    if (c1 == UINT64_MAX || c2 == UINT64_MAX) return UINT64_MAX;
    if (c2 != 0 && c1 > UINT64_MAX / c2) return UINT64_MAX;
    return c1 * c2;
}

OneCeosIndex build_1ceos(const ProjectedMatrix& pm, int b, bool two_sided) {
    if (b < 1) throw ParamError("build_1ceos: b must be >= 1");
    OneCeosIndex index;
    index.D = pm.D;
    index.n = pm.n;
    index.b = b;
    index.list_len = std::min(b, pm.n);
    index.two_sided = two_sided;
    index.max_lists.resize(static_cast<size_t>(pm.D) * index.list_len);
    if (two_sided) index.min_lists.resize(static_cast<size_t>(pm.D) * index.list_len);

    parallel_for(pm.D, [&](int64_t dim) {
        const auto order = sort_dimension(pm, static_cast<int>(dim));
        int32_t* top = index.max_lists.data() + static_cast<size_t>(dim) * index.list_len;
        std::copy(order.begin(), order.begin() + index.list_len, top);
        if (two_sided) {
            int32_t* bottom = index.min_lists.data() + static_cast<size_t>(dim) * index.list_len;
            for (int i = 0; i < index.list_len; ++i)
                bottom[i] = order[static_cast<size_t>(pm.n - 1 - i)];
        }
    });
    return index;
}

QueryResult query_1ceos(const OneCeosIndex& index, const VectorSet& data, const RotationSpec& rot,
                        const Vector& query, int k, bool two_sided) {
    if (k > index.b) throw ParamError("query_1ceos: k exceeds list size b");
    if (two_sided && !index.two_sided)
        throw ParamError("query_1ceos: index was built without min lists");

    StopWatch watch;
    const Vector signature = apply(rot, query);
    const double rotation_s = watch.seconds();

    watch.reset();
    const ExtremeDims dims = extreme_dims(signature, 1);
    std::vector<int32_t> candidates;
    const auto top = index.max_list(dims.max_dims[0]);
    candidates.assign(top.begin(), top.end());
    if (two_sided) {
        const auto bottom = index.min_list(dims.min_dims[0]);
        candidates.insert(candidates.end(), bottom.begin(), bottom.end());
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }
    const double probe_s = watch.seconds();

    QueryResult result = rerank(candidates, data, query, k);
    result.timings.rotation_s = rotation_s;
    result.timings.probe_s = probe_s;
    return result;
}

SceosFullIndex build_sceos_full(const ProjectedMatrix& pm, int s0, int b, uint64_t limit) {
    if (s0 < 1) throw ParamError("build_sceos_full: s0 must be >= 1");
    if (2 * s0 > pm.D) throw ParamError("build_sceos_full: 2*s0 exceeds D");
    if (b < 1) throw ParamError("build_sceos_full: b must be >= 1");

    long double approx = 0.0L;
    const uint64_t count = sceos_full_list_count(pm.D, s0, &approx);
    if (count > limit) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "build_sceos_full: %.3Lg lists for D=%d s0=%d exceed the limit of %llu",
                      approx, pm.D, s0, static_cast<unsigned long long>(limit));
        throw CapacityError(msg);
    }

    SceosFullIndex index;
    index.D = pm.D;
    index.n = pm.n;
    index.s0 = s0;
    index.b = b;

    // Enumerate I (ascending combinations), then J over the remaining dims.
    std::vector<int32_t> setI(static_cast<size_t>(s0));
    std::vector<int32_t> rest;
    std::vector<int32_t> setJ(static_cast<size_t>(s0));

    auto emit = [&]() {
        ExtremeDims dims;
        dims.max_dims = setI;
        dims.min_dims = setJ;
        std::vector<int32_t> key;
        key.reserve(static_cast<size_t>(2 * s0));
        key.insert(key.end(), setI.begin(), setI.end());
        key.insert(key.end(), setJ.begin(), setJ.end());
        index.lists.emplace(std::move(key), sceos_est_topb(pm, dims, b));
    };

    std::function<void(int, int)> chooseJ = [&](int start, int depth) {
        if (depth == s0) {
            emit();
            return;
        }
        for (int i = start; i < static_cast<int>(rest.size()); ++i) {
            setJ[static_cast<size_t>(depth)] = rest[static_cast<size_t>(i)];
            chooseJ(i + 1, depth + 1);
        }
    };
    std::function<void(int, int)> chooseI = [&](int start, int depth) {
        if (depth == s0) {
            rest.clear();
            for (int32_t dim = 0; dim < pm.D; ++dim)
                if (!std::binary_search(setI.begin(), setI.end(), dim)) rest.push_back(dim);
            chooseJ(0, 0);
            return;
        }
        for (int i = start; i < pm.D; ++i) {
            setI[static_cast<size_t>(depth)] = i;
            chooseI(i + 1, depth + 1);
        }
    };
    chooseI(0, 0);
    return index;
}

QueryResult query_sceos_full(const SceosFullIndex& index, const VectorSet& data,
                             const RotationSpec& rot, const Vector& query, int k) {
    if (k > index.b) throw ParamError("query_sceos_full: k exceeds list size b");

    StopWatch watch;
    const Vector signature = apply(rot, query);
    const double rotation_s = watch.seconds();

    watch.reset();
    const ExtremeDims dims = extreme_dims(signature, index.s0);
    std::vector<int32_t> key = detail::ascending(dims.max_dims);
    const std::vector<int32_t> j_sorted = detail::ascending(dims.min_dims);
    key.insert(key.end(), j_sorted.begin(), j_sorted.end());

    const auto it = index.lists.find(key);
    if (it == index.lists.end())
        throw std::logic_error("query_sceos_full: (I,J) key missing; index/parameter mismatch");
    const double probe_s = watch.seconds();

    QueryResult result = rerank(it->second, data, query, k);
    result.timings.rotation_s = rotation_s;
    result.timings.probe_s = probe_s;
    return result;
}

QueryResult query_sceos_est(const ProjectedMatrix& pm, const VectorSet& data,
                            const RotationSpec& rot, const Vector& query, int s0, int b, int k) {
    if (s0 < 1 || 2 * s0 > pm.D) throw ParamError("query_sceos_est: 2*s0 must fit in D");
    if (b < k) throw ParamError("query_sceos_est: b must be >= k");

    StopWatch watch;
    const Vector signature = apply(rot, query);
    const double rotation_s = watch.seconds();

    watch.reset();
    const ExtremeDims dims = extreme_dims(signature, s0);
    const std::vector<int32_t> candidates = sceos_est_topb(pm, dims, b);
    const double probe_s = watch.seconds();

    QueryResult result = rerank(candidates, data, query, k);
    result.timings.rotation_s = rotation_s;
    result.timings.probe_s = probe_s;
    result.candidates_examined = pm.n;
    return result;
}

SceosTaIndex build_sceos_ta(ProjectedMatrix pm) {
    SceosTaIndex index;
    index.D = pm.D;
    index.n = pm.n;
    index.sorted_ids.resize(static_cast<size_t>(pm.D) * pm.n);
    index.sorted_values.resize(static_cast<size_t>(pm.D) * pm.n);
    parallel_for(pm.D, [&](int64_t dim) {
        const auto order = sort_dimension(pm, static_cast<int>(dim));
        int32_t* ids = index.sorted_ids.data() + static_cast<size_t>(dim) * pm.n;
        float* values = index.sorted_values.data() + static_cast<size_t>(dim) * pm.n;
        const auto row = pm.values.row(dim);
        for (int i = 0; i < pm.n; ++i) {
            ids[i] = order[static_cast<size_t>(i)];
            values[i] = row[order[static_cast<size_t>(i)]];
        }
    });
    index.projected = std::move(pm);
    return index;
}

QueryResult query_sceos_ta(const SceosTaIndex& index, const VectorSet& data,
                           const RotationSpec& rot, const Vector& query, int s0, int b, int k) {
    if (s0 < 1 || 2 * s0 > index.D) throw ParamError("query_sceos_ta: 2*s0 must fit in D");
    if (b < k) throw ParamError("query_sceos_ta: b must be >= k");
    if (b > index.n) b = index.n;  // documented clamp

    StopWatch watch;
    const Vector signature = apply(rot, query);
    const double rotation_s = watch.seconds();

    watch.reset();
    const ExtremeDims dims = extreme_dims(signature, s0);
    const auto max_sorted = detail::ascending(dims.max_dims);
    const auto min_sorted = detail::ascending(dims.min_dims);

    // Strict round-robin sorted access: max-dim streams walk their lists
    // from the top (+value), min-dim streams from the tail (-value). Any
    // id seen for the first time is scored exactly over the s dimensions
    // by random access. After each round the threshold is the signed sum
    // of the current list positions; once the heap holds b candidates
    // none of which can be displaced by an unseen id, stop.
    detail::TopBHeap heap(b);
    std::vector<uint8_t> seen(static_cast<size_t>(index.n), 0);
    int64_t sorted_accesses = 0;
    int64_t examined = 0;

    for (int pos = 0; pos < index.n; ++pos) {
        double threshold = 0.0;
        for (int r = 0; r < s0; ++r) {
            const int max_dim = dims.max_dims[static_cast<size_t>(r)];
            const int32_t top_id = index.ids(max_dim)[static_cast<size_t>(pos)];
            threshold += static_cast<double>(index.values(max_dim)[static_cast<size_t>(pos)]);
            ++sorted_accesses;
            if (!seen[static_cast<size_t>(top_id)]) {
                seen[static_cast<size_t>(top_id)] = 1;
                ++examined;
                heap.offer(top_id,
                           detail::ceos_raw_sorted(index.projected, top_id, max_sorted, min_sorted));
            }

            const int min_dim = dims.min_dims[static_cast<size_t>(r)];
            const size_t tail = static_cast<size_t>(index.n - 1 - pos);
            const int32_t bottom_id = index.ids(min_dim)[tail];
            threshold -= static_cast<double>(index.values(min_dim)[tail]);
            ++sorted_accesses;
            if (!seen[static_cast<size_t>(bottom_id)]) {
                seen[static_cast<size_t>(bottom_id)] = 1;
                ++examined;
                heap.offer(bottom_id, detail::ceos_raw_sorted(index.projected, bottom_id,
                                                              max_sorted, min_sorted));
            }
        }
        if (heap.full() && heap.worst_score() >= threshold) break;
    }

    std::vector<int32_t> candidates = candidate_ids(heap.take_sorted());
    const double probe_s = watch.seconds();

    QueryResult result = rerank(candidates, data, query, k);
    result.timings.rotation_s = rotation_s;
    result.timings.probe_s = probe_s;
    result.sorted_accesses = sorted_accesses;
    result.candidates_examined = examined;
    return result;
}

CoCeosIndex build_coceos(const ProjectedMatrix& pm, int m) {
    if (m < 1) throw ParamError("build_coceos: m must be >= 1");
    CoCeosIndex index;
    index.D = pm.D;
    index.n = pm.n;
    index.m = m;
    index.list_len = std::min(m, pm.n);
    const size_t total = static_cast<size_t>(pm.D) * index.list_len;
    index.max_ids.resize(total);
    index.max_values.resize(total);
    index.min_ids.resize(total);
    index.min_values.resize(total);

    parallel_for(pm.D, [&](int64_t dim) {
        const auto order = sort_dimension(pm, static_cast<int>(dim));
        const auto row = pm.values.row(static_cast<int>(dim));
        const size_t base = static_cast<size_t>(dim) * index.list_len;
        for (int i = 0; i < index.list_len; ++i) {
            const int32_t hi = order[static_cast<size_t>(i)];
            index.max_ids[base + i] = hi;
            index.max_values[base + i] = row[hi];
            const int32_t lo = order[static_cast<size_t>(pm.n - 1 - i)];
            index.min_ids[base + i] = lo;
            index.min_values[base + i] = row[lo];
        }
    });
    return index;
}

QueryResult query_coceos(const CoCeosIndex& index, const VectorSet& data, const RotationSpec& rot,
                         const Vector& query, int sprime, int64_t budget, int b, int k) {
    if (sprime < 2 || sprime % 2 != 0) throw ParamError("query_coceos: s' must be even and >= 2");
    if (sprime > index.D) throw ParamError("query_coceos: s' exceeds D");
    if (budget < sprime) throw ParamError("query_coceos: budget B must be >= s'");
    if (b < k) throw ParamError("query_coceos: b must be >= k");

    StopWatch watch;
    const Vector signature = apply(rot, query);
    const double rotation_s = watch.seconds();

    watch.reset();
    const int half = sprime / 2;
    const ExtremeDims dims = extreme_dims(signature, half);
    const auto max_sorted = detail::ascending(dims.max_dims);
    const auto min_sorted = detail::ascending(dims.min_dims);

    // Per-list scan depth B/s', clamped to the stored list length.
    const int per_list =
        static_cast<int>(std::min<int64_t>(budget / sprime, index.list_len));
    const int64_t effective_budget = static_cast<int64_t>(per_list) * sprime;

    std::unordered_map<int32_t, double> histogram;
    histogram.reserve(static_cast<size_t>(effective_budget));
    for (int32_t dim : max_sorted) {
        const size_t base = static_cast<size_t>(dim) * index.list_len;
        for (int i = 0; i < per_list; ++i)
            histogram[index.max_ids[base + i]] +=
                static_cast<double>(index.max_values[base + i]);
    }
    for (int32_t dim : min_sorted) {
        const size_t base = static_cast<size_t>(dim) * index.list_len;
        for (int i = 0; i < per_list; ++i)
            histogram[index.min_ids[base + i]] -=
                static_cast<double>(index.min_values[base + i]);
    }

    detail::TopBHeap heap(b);
    for (const auto& [id, estimate] : histogram) heap.offer(id, estimate);
    std::vector<int32_t> candidates = candidate_ids(heap.take_sorted());
    const double probe_s = watch.seconds();

    QueryResult result = rerank(candidates, data, query, k);
    result.timings.rotation_s = rotation_s;
    result.timings.probe_s = probe_s;
    result.candidates_examined = static_cast<int64_t>(histogram.size());
    result.effective_budget = effective_budget;
    return result;
}

QueryResult rerank(std::span<const int32_t> candidates, const VectorSet& data, const Vector& query,
                   int k) {
    if (k < 1) throw ParamError("rerank: k must be >= 1");
    StopWatch watch;
    const int d = data.dim();
    detail::TopBHeap heap(std::min<int>(k, static_cast<int>(candidates.size())));
    for (int32_t id : candidates) {
        if (id < 0 || id >= data.size()) throw ParamError("rerank: candidate id out of range");
        heap.offer(id, dot_exact(data.points.col(id).data(), query.data(), d));
    }
    QueryResult result;
    result.entries = heap.take_sorted();
    result.candidates_examined = static_cast<int64_t>(candidates.size());
    result.timings.rerank_s = watch.seconds();
    return result;
}

}  // namespace ceos
