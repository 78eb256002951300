#pragma once

#include "ceos/core.hpp"

#include <optional>
#include <string>

namespace ceos {

enum class FileFormat { fvecs, csv, raw_f32 };

FileFormat parse_format(const std::string& name);
const char* format_name(FileFormat f);

/// Data matrix, query set and (optionally) the exact top-k ids per query.
struct Dataset {
    VectorSet data;
    VectorSet queries;
    int gt_k = 0;
    std::vector<int32_t> ground_truth;  // queries.size() x gt_k, row-major

    std::span<const int32_t> truth_row(int q) const {
        return {ground_truth.data() + static_cast<size_t>(q) * gt_k, static_cast<size_t>(gt_k)};
    }
};

// fvecs: repeated records [i32 dim | dim * f32]. csv: one vector per line.
// raw-f32: u64 n, u64 d, then n*d floats point-major.
VectorSet load_vectors(const std::string& path, FileFormat format);
void save_vectors(const std::string& path, const VectorSet& set, FileFormat format);

/// Exact top-k ids for every query (brute force, parallel over queries).
std::vector<int32_t> compute_groundtruth(const VectorSet& data, const VectorSet& queries, int k);

/// Same, but stores the matrix (and k) into the dataset as well.
std::vector<int32_t> compute_groundtruth(Dataset& dataset, int k);

/// compute_groundtruth with a disk cache; the cache is keyed by the data
/// and query checksums and recomputed when either changes.
std::vector<int32_t> compute_groundtruth_cached(const VectorSet& data, const VectorSet& queries,
                                                int k, const std::string& cache_path,
                                                uint64_t data_checksum, uint64_t query_checksum,
                                                bool* cache_hit = nullptr);

/// |retrieved ∩ truth| / |truth|.
double precision_at_b(std::span<const int32_t> retrieved, std::span<const int32_t> truth);

struct SynthConfig {
    int n = 10'000;
    int d = 64;
    int clusters = 10;
    double gap = 0.5;        // target separation between planted and background
    int n_queries = 100;
    int planted_per_query = 10;
    double tau1 = 0.85;      // inner product of the best planted point
    // Norm profile of the background. head_fraction > 0 keeps only that
    // fraction of points at full scale and shrinks the rest by bulk_scale,
    // mimicking the skewed norm distributions of recommender/feature data.
    double head_fraction = 0.0;
    double bulk_scale = 1.0;
    uint64_t seed = 1;
};

/// Clustered corpus with a planted top-k per query: each query gets
/// planted_per_query unit points at inner products tau1 down to
/// tau1 - 0.05, while background points are scaled so their expected
/// maximum inner product sits near tau1 - gap.
Dataset synthesize(const SynthConfig& config);

uint64_t checksum_file(const std::string& path);
uint64_t checksum_matrix(const Matrix& m);

}  // namespace ceos
