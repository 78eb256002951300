// ceos: build, query and benchmark CEOs-family MIPS indexes from the
// command line. One binary, five subcommands; all randomness flows from
// --seed. Exit codes: 0 ok, 2 parameter error, 3 format error, 4 capacity
// error.

#include "ceos/bench.hpp"
#include "ceos/indexes.hpp"
#include "ceos/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using nlohmann::json;

namespace {

int log_level() {
    const char* env = std::getenv("CEOS_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[ceos] " << msg << "\n";
}

// Every subcommand announces its resolved configuration (defaults and seed
// included) before doing any work.
void print_config(const std::string& command, const json& config) {
    std::cout << "config " << command << " " << config.dump() << std::endl;
}

struct CommonFlags {
    std::string data_path;
    std::string format = "fvecs";
    std::string query_path;
    std::string query_format;
    std::string algo = "sceos-ta";
    std::string index_path;
    std::string out_path;
    int D = 0;
    int s0 = 5;
    int sprime = 20;
    int64_t B = 0;
    int m = 0;
    int b = 100;
    int k = 10;
    int l = 128;
    uint64_t seed = 1;
    int threads = 1;
    int repeats = 5;
    bool normalize_queries = false;
    bool two_sided = false;
    std::string rotation = "spinner";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--seed", f.seed, "Master seed for every random choice");
    cmd->add_option("--threads", f.threads, "Worker thread cap");
}

int next_power_of_two(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

ceos::VectorSet load_set(const std::string& path, const std::string& format) {
    return ceos::load_vectors(path, ceos::parse_format(format));
}

json meta_path_load(const std::string& index_path) {
    std::ifstream in(index_path + ".meta.json");
    if (!in) throw ceos::FormatError("missing metadata sidecar: " + index_path + ".meta.json");
    json meta;
    in >> meta;
    return meta;
}

int cmd_build(const CommonFlags& f) {
    print_config("build", json{{"data", f.data_path},
                               {"format", f.format},
                               {"algo", f.algo},
                               {"index", f.index_path},
                               {"D", f.D},
                               {"s0", f.s0},
                               {"b", f.b},
                               {"m", f.m},
                               {"B", f.B},
                               {"sprime", f.sprime},
                               {"two_sided", f.two_sided},
                               {"rotation", f.rotation},
                               {"seed", f.seed},
                               {"threads", f.threads}});
    ceos::set_num_threads(f.threads);
    const ceos::VectorSet data = load_set(f.data_path, f.format);
    if (data.size() == 0) throw ceos::ParamError("build: data set is empty");
    const uint64_t data_checksum = ceos::checksum_file(f.data_path);

    const int requested_D = f.D > 0 ? f.D : next_power_of_two(data.dim());
    const auto kind = f.rotation == "gaussian" ? ceos::RotationKind::gaussian
                                               : ceos::RotationKind::spinner;

    ceos::StopWatch watch;
    const ceos::RotationSpec rot = ceos::make_rotation(kind, f.seed, data.dim(), requested_D);
    ceos::ProjectedMatrix pm = ceos::project_all(rot, data);
    log_debug("projected " + std::to_string(pm.n) + " points into D=" + std::to_string(pm.D));

    ceos::LoadedIndex li;
    li.d = data.dim();
    li.rotation = rot;
    json params{{"D", pm.D}, {"seed", f.seed}, {"rotation", f.rotation}};
    if (f.algo == "1ceos") {
        li.algo = ceos::IndexAlgo::one_ceos;
        li.index = ceos::build_1ceos(pm, f.b, f.two_sided);
        params["b"] = f.b;
        params["two_sided"] = f.two_sided;
    } else if (f.algo == "sceos") {
        li.algo = ceos::IndexAlgo::sceos_full;
        li.index = ceos::build_sceos_full(pm, f.s0, f.b);
        params["s0"] = f.s0;
        params["b"] = f.b;
    } else if (f.algo == "sceos-ta") {
        li.algo = ceos::IndexAlgo::sceos_ta;
        li.index = ceos::build_sceos_ta(std::move(pm));
        params["s0_default"] = f.s0;
    } else if (f.algo == "coceos") {
        li.algo = ceos::IndexAlgo::coceos;
        const int64_t B = f.B > 0 ? f.B : std::max<int64_t>(data.size() / 100, f.sprime);
        const int m = f.m > 0 ? f.m : static_cast<int>((B + f.sprime - 1) / f.sprime);
        li.index = ceos::build_coceos(pm, m);
        params["m"] = m;
        params["sprime_default"] = f.sprime;
        params["B_default"] = B;
    } else {
        throw ceos::ParamError("build: unknown algorithm '" + f.algo +
                               "' (expected 1ceos, sceos, sceos-ta or coceos)");
    }
    const double build_s = watch.seconds();

    ceos::save_index_file(f.index_path, li);

    json meta{{"algorithm", f.algo},
              {"n", data.size()},
              {"d", data.dim()},
              {"D", rot.D},
              {"params", params},
              {"seed", f.seed},
              {"build_seconds", build_s},
              {"data_checksum", data_checksum},
              {"data_path", f.data_path}};
    std::ofstream meta_out(f.index_path + ".meta.json");
    meta_out << meta.dump(2) << "\n";

    std::cout << "built " << f.algo << " index over n=" << data.size() << " d=" << data.dim()
              << " in " << build_s << " s -> " << f.index_path << std::endl;
    return 0;
}

int cmd_query(const CommonFlags& f) {
    print_config("query", json{{"index", f.index_path},
                               {"data", f.data_path},
                               {"format", f.format},
                               {"queries", f.query_path},
                               {"query_format", f.query_format.empty() ? f.format : f.query_format},
                               {"k", f.k},
                               {"b", f.b},
                               {"s0", f.s0},
                               {"sprime", f.sprime},
                               {"B", f.B},
                               {"two_sided", f.two_sided},
                               {"normalize_queries", f.normalize_queries},
                               {"out", f.out_path},
                               {"seed", f.seed},
                               {"threads", f.threads}});
    ceos::set_num_threads(f.threads);

    const json meta = meta_path_load(f.index_path);
    const uint64_t data_checksum = ceos::checksum_file(f.data_path);
    if (meta.at("data_checksum").get<uint64_t>() != data_checksum)
        throw ceos::ParamError("metadata mismatch: data_checksum");

    const ceos::VectorSet data = load_set(f.data_path, f.format);
    if (meta.at("d").get<int>() != data.dim()) throw ceos::ParamError("metadata mismatch: d");
    if (meta.at("n").get<int>() != data.size()) throw ceos::ParamError("metadata mismatch: n");

    ceos::LoadedIndex li = ceos::load_index_file(f.index_path);
    if (li.rotation.seed != meta.at("seed").get<uint64_t>())
        throw ceos::ParamError("metadata mismatch: seed");
    if (li.d != data.dim()) throw ceos::ParamError("metadata mismatch: d");

    ceos::VectorSet queries =
        load_set(f.query_path, f.query_format.empty() ? f.format : f.query_format);
    if (queries.size() > 0 && queries.dim() != data.dim())
        throw ceos::ParamError("query dimension does not match data dimension");
    if (f.normalize_queries) {
        for (int q = 0; q < queries.size(); ++q) {
            const float norm = queries.points.col(q).norm();
            if (norm > 0) queries.points.col(q) /= norm;
        }
    }

    const int64_t B = f.B > 0 ? f.B : std::max<int64_t>(data.size() / 100, f.sprime);
    std::vector<ceos::QueryResult> results(static_cast<size_t>(queries.size()));
    ceos::StopWatch watch;
    for (int q = 0; q < queries.size(); ++q) {
        const ceos::Vector query = queries.col(q);
        ceos::QueryResult r;
        switch (li.algo) {
            case ceos::IndexAlgo::one_ceos:
                r = ceos::query_1ceos(std::get<ceos::OneCeosIndex>(li.index), data, li.rotation,
                                      query, f.k, f.two_sided);
                break;
            case ceos::IndexAlgo::sceos_full:
                r = ceos::query_sceos_full(std::get<ceos::SceosFullIndex>(li.index), data,
                                           li.rotation, query, f.k);
                break;
            case ceos::IndexAlgo::sceos_ta:
                r = ceos::query_sceos_ta(std::get<ceos::SceosTaIndex>(li.index), data, li.rotation,
                                         query, f.s0, f.b, f.k);
                break;
            case ceos::IndexAlgo::coceos:
                r = ceos::query_coceos(std::get<ceos::CoCeosIndex>(li.index), data, li.rotation,
                                       query, f.sprime, B, f.b, f.k);
                break;
        }
        results[static_cast<size_t>(q)] = std::move(r);
    }
    const double total_s = watch.seconds();

    // Results file: one row per (query, rank). Timings go to stdout only so
    // the artifact is byte-stable under a fixed seed.
    const bool as_json = f.out_path.size() > 5 &&
                         f.out_path.substr(f.out_path.size() - 5) == ".json";
    std::ofstream out(f.out_path);
    if (!out) throw ceos::FormatError("cannot open for writing: " + f.out_path);
    if (as_json) {
        json rows = json::array();
        for (size_t q = 0; q < results.size(); ++q) {
            json row{{"query", q}, {"ids", json::array()}, {"values", json::array()}};
            for (const auto& [id, value] : results[q].entries) {
                row["ids"].push_back(id);
                row["values"].push_back(value);
            }
            rows.push_back(std::move(row));
        }
        out << rows.dump(2) << "\n";
    } else {
        out << "query,rank,id,inner_product\n";
        char buf[128];
        for (size_t q = 0; q < results.size(); ++q)
            for (size_t r = 0; r < results[q].entries.size(); ++r) {
                std::snprintf(buf, sizeof(buf), "%zu,%zu,%d,%.17g\n", q, r,
                              results[q].entries[r].first, results[q].entries[r].second);
                out << buf;
            }
    }

    double mean_ms = queries.size() > 0 ? total_s / queries.size() * 1e3 : 0.0;
    std::cout << "queries: " << queries.size() << "  mean latency: " << mean_ms
              << " ms  total: " << total_s << " s" << std::endl;
    return 0;
}

int cmd_bench(const CLI::App* cmd, const CommonFlags& f, const std::string& config_path,
              const std::vector<std::string>& algo_list) {
    ceos::BenchConfig cfg;
    if (!config_path.empty()) cfg = ceos::parse_bench_config(config_path);
    const auto passed = [&](const std::string& flag) { return cmd->count(flag) > 0; };
    if (!f.data_path.empty()) {
        cfg.data_path = f.data_path;
        cfg.data_format = ceos::parse_format(f.format);
    }
    if (!f.query_path.empty()) {
        cfg.query_path = f.query_path;
        cfg.query_format = ceos::parse_format(f.query_format.empty() ? f.format : f.query_format);
    }
    for (const auto& name : algo_list) cfg.algos.push_back(ceos::AlgoSpec{name});
    if (passed("--k")) cfg.k = f.k;
    if (passed("--b")) cfg.b = f.b;
    if (passed("--D")) cfg.D = f.D;
    if (passed("--s0")) cfg.s0 = f.s0;
    if (passed("--sprime")) cfg.sprime = f.sprime;
    if (passed("--B")) cfg.B = f.B;
    if (passed("--m")) cfg.m = f.m;
    if (passed("--l")) cfg.l = f.l;
    if (passed("--seed")) cfg.seed = f.seed;
    if (passed("--repeats")) cfg.repeats = f.repeats;
    if (passed("--threads")) cfg.threads = f.threads;
    if (f.normalize_queries) cfg.normalize_queries = true;
    if (!f.out_path.empty()) {
        cfg.out_json = f.out_path + ".json";
        cfg.out_csv = f.out_path + ".csv";
    }
    if (cfg.algos.empty())
        cfg.algos = {{"bruteforce"}, {"sceos-est"}, {"sceos-ta"}, {"coceos"}};

    json algo_json = json::array();
    for (const auto& a : cfg.algos) algo_json.push_back(a.name);
    print_config("bench", json{{"data", cfg.data_path},
                               {"queries", cfg.query_path},
                               {"k", cfg.k},
                               {"b", cfg.b},
                               {"D", cfg.D},
                               {"s0", cfg.s0},
                               {"sprime", cfg.sprime},
                               {"B", cfg.B},
                               {"m", cfg.m},
                               {"l", cfg.l},
                               {"rotation", cfg.rotation},
                               {"repeats", cfg.repeats},
                               {"seed", cfg.seed},
                               {"threads", cfg.threads},
                               {"normalize_queries", cfg.normalize_queries},
                               {"algos", algo_json},
                               {"out_json", cfg.out_json},
                               {"out_csv", cfg.out_csv}});

    const ceos::BenchmarkReport report = ceos::run_benchmark(cfg);
    std::cout << "bruteforce mean query: " << report.bruteforce_query_ms << " ms\n";
    for (const auto& row : report.algorithms) {
        std::cout << row.name << ": P@" << row.params.b << "=" << row.mean_p_at_b
                  << "  query=" << row.mean_query_ms << " ms  speedup=" << row.speedup
                  << "  build=" << row.build_s << " s\n";
    }
    return 0;
}

int cmd_groundtruth(const CommonFlags& f) {
    print_config("groundtruth", json{{"data", f.data_path},
                                     {"format", f.format},
                                     {"queries", f.query_path},
                                     {"k", f.k},
                                     {"out", f.out_path},
                                     {"seed", f.seed},
                                     {"threads", f.threads}});
    ceos::set_num_threads(f.threads);
    const ceos::VectorSet data = load_set(f.data_path, f.format);
    const ceos::VectorSet queries =
        load_set(f.query_path, f.query_format.empty() ? f.format : f.query_format);
    const auto truth = ceos::compute_groundtruth(data, queries, f.k);

    std::ofstream out(f.out_path);
    if (!out) throw ceos::FormatError("cannot open for writing: " + f.out_path);
    out << "query";
    for (int i = 0; i < f.k; ++i) out << ",id" << i;
    out << "\n";
    for (int q = 0; q < queries.size(); ++q) {
        out << q;
        for (int i = 0; i < f.k; ++i) out << "," << truth[static_cast<size_t>(q) * f.k + i];
        out << "\n";
    }
    std::cout << "wrote ground truth for " << queries.size() << " queries -> " << f.out_path
              << std::endl;
    return 0;
}

int cmd_synth(const CommonFlags& f, ceos::SynthConfig synth, const std::string& out_prefix) {
    synth.seed = f.seed;
    print_config("synth", json{{"n", synth.n},
                               {"d", synth.d},
                               {"clusters", synth.clusters},
                               {"gap", synth.gap},
                               {"queries", synth.n_queries},
                               {"planted_per_query", synth.planted_per_query},
                               {"tau1", synth.tau1},
                               {"head_fraction", synth.head_fraction},
                               {"bulk_scale", synth.bulk_scale},
                               {"seed", f.seed},
                               {"out", out_prefix}});
    const ceos::Dataset ds = ceos::synthesize(synth);
    ceos::save_vectors(out_prefix + ".data.raw", ds.data, ceos::FileFormat::raw_f32);
    ceos::save_vectors(out_prefix + ".queries.raw", ds.queries, ceos::FileFormat::raw_f32);
    std::cout << "wrote " << ds.data.size() << " points and " << ds.queries.size()
              << " queries with prefix " << out_prefix << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CEOs maximum inner product search toolkit"};
    app.require_subcommand(1);

    CommonFlags f;
    ceos::SynthConfig synth;
    std::string config_path;
    std::string out_prefix = "synth";
    std::vector<std::string> algo_list;

    auto* build = app.add_subcommand("build", "Build an index file from a data file");
    build->add_option("--data", f.data_path, "Data file")->required();
    build->add_option("--format", f.format, "fvecs, csv or raw-f32");
    build->add_option("--algo", f.algo, "1ceos, sceos, sceos-ta or coceos");
    build->add_option("--index", f.index_path, "Output index path")->required();
    build->add_option("--D", f.D, "Projection dimension (0 = next power of two >= d)");
    build->add_option("--s0", f.s0, "Extreme dimensions per side");
    build->add_option("--b", f.b, "Stored list length / rerank budget");
    build->add_option("--m", f.m, "coCEOs list length (0 = derive from B and s')");
    build->add_option("--B", f.B, "coCEOs budget used to derive m");
    build->add_option("--sprime", f.sprime, "coCEOs dimensions used to derive m");
    build->add_flag("--two-sided", f.two_sided, "Also store per-dimension bottom lists (2CEOs)");
    build->add_option("--rotation", f.rotation, "spinner or gaussian");
    add_common(build, f);

    auto* query = app.add_subcommand("query", "Run top-k queries against an index file");
    query->add_option("--index", f.index_path, "Index file")->required();
    query->add_option("--data", f.data_path, "Data file the index was built from")->required();
    query->add_option("--format", f.format, "fvecs, csv or raw-f32");
    query->add_option("--queries", f.query_path, "Query file")->required();
    query->add_option("--query-format", f.query_format, "Query file format (defaults to --format)");
    query->add_option("--k", f.k, "Results per query");
    query->add_option("--b", f.b, "Candidates before rerank (TA, coCEOs)");
    query->add_option("--s0", f.s0, "Extreme dimensions per side (TA)");
    query->add_option("--sprime", f.sprime, "coCEOs dimensions");
    query->add_option("--B", f.B, "coCEOs budget (0 = n/100)");
    query->add_flag("--two-sided", f.two_sided, "Probe max and min dimensions (1CEOs index)");
    query->add_flag("--normalize-queries", f.normalize_queries, "Scale queries to unit norm");
    query->add_option("--out", f.out_path, "Results file (.json or .csv)")->required();
    add_common(query, f);

    auto* bench = app.add_subcommand("bench", "Benchmark algorithms against brute force");
    bench->add_option("--config", config_path, "Key-value config file");
    bench->add_option("--data", f.data_path, "Data file (overrides config)");
    bench->add_option("--format", f.format, "fvecs, csv or raw-f32");
    bench->add_option("--queries", f.query_path, "Query file (overrides config)");
    bench->add_option("--query-format", f.query_format, "Query file format");
    bench->add_option("--algo", algo_list, "Algorithms to run (repeatable)");
    bench->add_option("--k", f.k, "Ground-truth depth");
    bench->add_option("--b", f.b, "Rerank budget");
    bench->add_option("--D", f.D, "Projection dimension");
    bench->add_option("--s0", f.s0, "Extreme dimensions per side");
    bench->add_option("--sprime", f.sprime, "coCEOs dimensions");
    bench->add_option("--B", f.B, "coCEOs budget");
    bench->add_option("--m", f.m, "coCEOs list length");
    bench->add_option("--l", f.l, "SimHash code length");
    bench->add_option("--repeats", f.repeats, "Measurement repeats");
    bench->add_flag("--normalize-queries", f.normalize_queries, "Scale queries to unit norm");
    bench->add_option("--out", f.out_path, "Report prefix (writes .json and .csv)");
    add_common(bench, f);

    auto* gt = app.add_subcommand("groundtruth", "Compute exact top-k ids per query");
    gt->add_option("--data", f.data_path, "Data file")->required();
    gt->add_option("--format", f.format, "fvecs, csv or raw-f32");
    gt->add_option("--queries", f.query_path, "Query file")->required();
    gt->add_option("--query-format", f.query_format, "Query file format");
    gt->add_option("--k", f.k, "Depth");
    gt->add_option("--out", f.out_path, "Output CSV")->required();
    add_common(gt, f);

    auto* sy = app.add_subcommand("synth", "Generate a planted-top-k synthetic data set");
    sy->add_option("--n", synth.n, "Number of data points");
    sy->add_option("--d", synth.d, "Dimension");
    sy->add_option("--clusters", synth.clusters, "Background cluster count");
    sy->add_option("--gap", synth.gap, "Target gap between planted and background");
    sy->add_option("--queries", synth.n_queries, "Number of queries");
    sy->add_option("--tau1", synth.tau1, "Top planted inner product");
    sy->add_option("--head-fraction", synth.head_fraction,
                   "Fraction of background points kept at full norm (0 = uniform norms)");
    sy->add_option("--bulk-scale", synth.bulk_scale, "Norm multiplier for non-head background");
    sy->add_option("--out", out_prefix, "Output prefix");
    add_common(sy, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (build->parsed()) return cmd_build(f);
        if (query->parsed()) return cmd_query(f);
        if (bench->parsed()) return cmd_bench(bench, f, config_path, algo_list);
        if (gt->parsed()) return cmd_groundtruth(f);
        if (sy->parsed()) return cmd_synth(f, synth, out_prefix);
    } catch (const ceos::ParamError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const ceos::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const ceos::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
