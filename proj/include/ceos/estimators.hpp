#pragma once

#include "ceos/core.hpp"
#include "ceos/projection.hpp"

#include <algorithm>

namespace ceos {

/// Concomitant inner-product estimate of one point. raw is the signed sum
/// of signature entries over the extreme dimensions; normalized divides by
/// s * sqrt(2 ln D) (s = number of dimensions summed) to approximate the
/// inner product value itself.
struct CeosEstimate {
    double raw = 0.0;
    double normalized = 0.0;
};

/// Sign-of-projection code with the stored 2-norm of the encoded vector.
struct BinaryCode {
    std::vector<uint64_t> words;
    int length = 0;  // number of valid bits
    double norm = 0.0;
};

/// Signed concomitant sum for one point: sum over max_dims of X'[i, id]
/// minus sum over min_dims of X'[j, id]. Dimensions are accumulated in
/// ascending index order regardless of the order given, so every caller
/// (full scan, TA, coCEOs, precomputed lists) produces bit-identical
/// estimates for the same dimension sets.
double ceos_raw(const ProjectedMatrix& pm, int32_t id, std::span<const int32_t> max_dims,
                std::span<const int32_t> min_dims);

CeosEstimate ceos_estimate(const ProjectedMatrix& pm, int32_t id, const ExtremeDims& dims);

/// sCEOs-Est: scans all n points, returns the b ids with the largest raw
/// estimates (descending, ties toward the lower id). b is clamped to n.
std::vector<int32_t> sceos_est_topb(const ProjectedMatrix& pm, const ExtremeDims& dims, int b);

BinaryCode simhash_encode(const Vector& x, int code_length, uint64_t seed);

/// Inverts the collision rate: estimate = |x||q| cos(pi * (1 - matches/l)).
double simhash_estimate(const BinaryCode& cx, const BinaryCode& cq);

int simhash_matches(const BinaryCode& cx, const BinaryCode& cq);

/// SimpleLSH asymmetric transform: x -> {x/M, sqrt(1 - |x|^2/M^2)} with M
/// the maximum norm over the set. Every transformed point has unit norm
/// and inner-product order against transformed queries is preserved.
struct SimpleLshTransform {
    VectorSet points;  // (d+1) x n
    double max_norm = 0.0;
};
SimpleLshTransform simplelsh_transform(const VectorSet& set);

/// Query side of the transform: appends a zero coordinate. The caller
/// provides a unit-norm query; a zero-norm query is rejected.
Vector simplelsh_transform_query(const Vector& q);

/// Exact top-k by inner product over the whole set, descending, ties
/// toward the lower id. Doubles as the ground-truth oracle; wall time is
/// recorded in timings.rerank_s.
QueryResult brute_force_topk(const VectorSet& set, const Vector& query, int k);

/// Reusable SimHash encoder; materializes the l x d hyperplane matrix once
/// so bulk encoding is a matrix product instead of l*d draws per point.
class SimHashCoder {
public:
    SimHashCoder(int d, int code_length, uint64_t seed);
    BinaryCode encode(const Vector& x) const;
    int code_length() const { return static_cast<int>(planes_.rows()); }

private:
    Matrix planes_;  // l x d
};

namespace detail {

// Bounded best-b collector under the (score desc, id asc) total order.
// The kept set is independent of insertion order.
class TopBHeap {
public:
    explicit TopBHeap(int capacity) : capacity_(capacity) {}

    bool full() const { return static_cast<int>(heap_.size()) == capacity_; }
    size_t size() const { return heap_.size(); }
    double worst_score() const { return heap_.front().score; }

    void offer(int32_t id, double score) {
        if (static_cast<int>(heap_.size()) < capacity_) {
            heap_.push_back({id, score});
            std::push_heap(heap_.begin(), heap_.end(), better);
        } else if (better({id, score}, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), better);
            heap_.back() = {id, score};
            std::push_heap(heap_.begin(), heap_.end(), better);
        }
    }

    /// Drains into (id, score) pairs, best first.
    std::vector<std::pair<int32_t, double>> take_sorted();

private:
    struct Entry {
        int32_t id;
        double score;
    };
    // "a better than b" as the heap comparator puts the worst entry on top.
    static bool better(const Entry& a, const Entry& b) {
        return better_scored(a.score, a.id, b.score, b.id);
    }

    int capacity_;
    std::vector<Entry> heap_;
};

// ceos_raw with dimensions already in ascending index order (skips the
// per-call canonicalization on hot paths).
double ceos_raw_sorted(const ProjectedMatrix& pm, int32_t id, std::span<const int32_t> max_sorted,
                       std::span<const int32_t> min_sorted);

std::vector<int32_t> ascending(std::span<const int32_t> dims);

}  // namespace detail

}  // namespace ceos
