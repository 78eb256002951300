#include "ceos/estimators.hpp"

#include <bit>
#include <cmath>

namespace ceos {

namespace detail {

std::vector<std::pair<int32_t, double>> TopBHeap::take_sorted() {
    std::vector<std::pair<int32_t, double>> out(heap_.size());
    for (size_t i = heap_.size(); i-- > 0;) {
        std::pop_heap(heap_.begin(), heap_.begin() + i + 1, better);
        out[i] = {heap_[i].id, heap_[i].score};
    }
    heap_.clear();
    return out;
}

double ceos_raw_sorted(const ProjectedMatrix& pm, int32_t id, std::span<const int32_t> max_sorted,
                       std::span<const int32_t> min_sorted) {
    const float* col = pm.values.col(id).data();
    double acc = 0.0;
    for (int32_t i : max_sorted) acc += static_cast<double>(col[i]);
    for (int32_t j : min_sorted) acc -= static_cast<double>(col[j]);
    return acc;
}

std::vector<int32_t> ascending(std::span<const int32_t> dims) {
    std::vector<int32_t> out(dims.begin(), dims.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

double ceos_raw(const ProjectedMatrix& pm, int32_t id, std::span<const int32_t> max_dims,
                std::span<const int32_t> min_dims) {
    if (id < 0 || id >= pm.n) throw ParamError("ceos_raw: point id out of range");
    for (int32_t i : max_dims)
        if (i < 0 || i >= pm.D) throw ParamError("ceos_raw: dimension out of range");
    for (int32_t j : min_dims)
        if (j < 0 || j >= pm.D) throw ParamError("ceos_raw: dimension out of range");
    const auto max_sorted = detail::ascending(max_dims);
    const auto min_sorted = detail::ascending(min_dims);
    return detail::ceos_raw_sorted(pm, id, max_sorted, min_sorted);
}

CeosEstimate ceos_estimate(const ProjectedMatrix& pm, int32_t id, const ExtremeDims& dims) {
    if (dims.max_dims.empty() && dims.min_dims.empty())
        throw ParamError("ceos_estimate: empty dimension sets");
    CeosEstimate est;
    est.raw = ceos_raw(pm, id, dims.max_dims, dims.min_dims);
    const double s = static_cast<double>(dims.max_dims.size() + dims.min_dims.size());
    est.normalized = est.raw / (s * std::sqrt(2.0 * std::log(static_cast<double>(pm.D))));
    return est;
}

std::vector<int32_t> sceos_est_topb(const ProjectedMatrix& pm, const ExtremeDims& dims, int b) {
    if (b < 1) throw ParamError("sceos_est_topb: b must be >= 1");
    if (b > pm.n) b = pm.n;  // documented clamp
    const auto max_sorted = detail::ascending(dims.max_dims);
    const auto min_sorted = detail::ascending(dims.min_dims);

    detail::TopBHeap heap(b);
    for (int32_t id = 0; id < pm.n; ++id)
        heap.offer(id, detail::ceos_raw_sorted(pm, id, max_sorted, min_sorted));

    auto ranked = heap.take_sorted();
    std::vector<int32_t> ids(ranked.size());
    for (size_t i = 0; i < ranked.size(); ++i) ids[i] = ranked[i].first;
    return ids;
}

SimHashCoder::SimHashCoder(int d, int code_length, uint64_t seed) {
    if (d < 1 || code_length < 1) throw ParamError("SimHashCoder: bad dimensions");
    planes_.resize(code_length, d);
    for (int i = 0; i < code_length; ++i) {
        rng::Stream stream(rng::mix(rng::mix(seed, rng::kSimHashTag), static_cast<uint64_t>(i)));
        for (int j = 0; j < d; ++j) planes_(i, j) = static_cast<float>(stream.next_gaussian());
    }
}

BinaryCode SimHashCoder::encode(const Vector& x) const {
    if (x.size() != planes_.cols()) throw ParamError("SimHashCoder::encode: dimension mismatch");
    const int l = code_length();
    BinaryCode code;
    code.length = l;
    code.norm = std::sqrt(dot_exact(x, x));
    code.words.assign(static_cast<size_t>((l + 63) / 64), 0);
    const int d = static_cast<int>(planes_.cols());
    for (int i = 0; i < l; ++i) {
        double proj = 0.0;
        for (int j = 0; j < d; ++j)
            proj += static_cast<double>(planes_(i, j)) * static_cast<double>(x[j]);
        if (proj >= 0.0) code.words[static_cast<size_t>(i) >> 6] |= uint64_t{1} << (i & 63);
    }
    return code;
}

BinaryCode simhash_encode(const Vector& x, int code_length, uint64_t seed) {
    return SimHashCoder(static_cast<int>(x.size()), code_length, seed).encode(x);
}

int simhash_matches(const BinaryCode& cx, const BinaryCode& cq) {
    if (cx.length != cq.length) throw ParamError("simhash: code length mismatch");
    int differing = 0;
    for (size_t w = 0; w < cx.words.size(); ++w)
        differing += std::popcount(cx.words[w] ^ cq.words[w]);
    return cx.length - differing;
}

double simhash_estimate(const BinaryCode& cx, const BinaryCode& cq) {
    const int matches = simhash_matches(cx, cq);
    const double theta = M_PI * (1.0 - static_cast<double>(matches) / cx.length);
    return cx.norm * cq.norm * std::cos(theta);
}

SimpleLshTransform simplelsh_transform(const VectorSet& set) {
    const int d = set.dim();
    const int n = set.size();
    double max_norm = 0.0;
    std::vector<double> norms(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const float* p = set.points.col(j).data();
        norms[static_cast<size_t>(j)] = std::sqrt(dot_exact(p, p, d));
        max_norm = std::max(max_norm, norms[static_cast<size_t>(j)]);
    }
    const double M = max_norm > 0.0 ? max_norm : 1.0;

    SimpleLshTransform out;
    out.max_norm = M;
    out.points.points.resize(d + 1, n);
    for (int j = 0; j < n; ++j) {
        const double ratio = norms[static_cast<size_t>(j)] / M;
        out.points.points.col(j).head(d) = set.col(j) / static_cast<float>(M);
        out.points.points(d, j) = static_cast<float>(std::sqrt(std::max(0.0, 1.0 - ratio * ratio)));
    }
    return out;
}

Vector simplelsh_transform_query(const Vector& q) {
    if (dot_exact(q, q) == 0.0) throw ParamError("simplelsh_transform_query: zero-norm query");
    Vector out(q.size() + 1);
    out.head(q.size()) = q;
    out[q.size()] = 0.0f;
    return out;
}

QueryResult brute_force_topk(const VectorSet& set, const Vector& query, int k) {
    if (set.dim() != query.size()) throw ParamError("brute_force_topk: dimension mismatch");
    if (k < 1 || k > set.size()) throw ParamError("brute_force_topk: k out of range");

    StopWatch watch;
    detail::TopBHeap heap(k);
    const int d = set.dim();
    for (int32_t id = 0; id < set.size(); ++id)
        heap.offer(id, dot_exact(set.points.col(id).data(), query.data(), d));

    QueryResult result;
    result.entries = heap.take_sorted();
    result.candidates_examined = set.size();
    result.timings.rerank_s = watch.seconds();
    return result;
}

}  // namespace ceos
