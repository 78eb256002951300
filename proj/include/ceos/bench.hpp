#pragma once

#include "ceos/dataset.hpp"

#include <string>
#include <vector>

namespace ceos {

/// One benchmark entry. Unset (zero) parameters fall back to the global
/// values in BenchConfig, which in turn fall back to the defaults below.
struct AlgoSpec {
    std::string name;  // bruteforce | 1ceos | 2ceos | sceos | sceos-est |
                       // sceos-ta | coceos | simhash | simplelsh
    int D = 0;
    int s0 = 0;
    int sprime = 0;
    int b = 0;
    int l = 0;
    int m = 0;
    int64_t B = 0;
};

struct BenchConfig {
    std::string data_path;
    FileFormat data_format = FileFormat::fvecs;
    std::string query_path;
    FileFormat query_format = FileFormat::fvecs;

    int k = 10;
    int b = 100;             // rerank budget
    int D = 0;               // 0 = next power of two >= d
    int s0 = 5;
    int sprime = 20;
    int64_t B = 0;           // 0 = n / 100
    int m = 0;               // 0 = ceil(B / s')
    int l = 128;             // SimHash code length
    std::string rotation = "spinner";  // or "gaussian"
    uint64_t seed = 1;
    int repeats = 5;
    int threads = 1;
    bool normalize_queries = false;

    std::string out_json;
    std::string out_csv;
    std::string gt_cache;

    std::vector<AlgoSpec> algos;
};

/// Parameters after defaulting, echoed into the report.
struct ResolvedParams {
    int D = 0, s0 = 0, sprime = 0, b = 0, l = 0, m = 0, k = 0;
    int64_t B = 0;
};

struct AlgoReport {
    std::string name;
    ResolvedParams params;
    double mean_p_at_b = 0.0;
    double mean_query_ms = 0.0;    // rotation + probe + rerank
    double mean_rotation_ms = 0.0;
    double mean_probe_ms = 0.0;
    double mean_rerank_ms = 0.0;
    double speedup = 0.0;          // brute-force mean latency / this latency
    double build_s = 0.0;
    int64_t index_bytes = 0;
    uint64_t seed = 0;
};

struct BenchmarkReport {
    int n = 0, d = 0, n_queries = 0, k = 0, repeats = 0;
    uint64_t seed = 0;
    double bruteforce_query_ms = 0.0;
    std::vector<AlgoReport> algorithms;
};

/// `key = value` lines, '#' comments; `algo = name key=value...` may repeat.
BenchConfig parse_bench_config(const std::string& path);

/// Loads data/queries from the config paths and runs the benchmark.
BenchmarkReport run_benchmark(const BenchConfig& config);

/// In-memory variant (checksums key the ground-truth cache).
BenchmarkReport run_benchmark(const BenchConfig& config, const VectorSet& data,
                              const VectorSet& queries, uint64_t data_checksum,
                              uint64_t query_checksum);

void write_report_json(const BenchmarkReport& report, const std::string& path);
void write_report_csv(const BenchmarkReport& report, const std::string& path);

}  // namespace ceos
