#include "ceos/bench.hpp"

#include "ceos/indexes.hpp"
#include "ceos/serialize.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace ceos {

namespace {

int next_power_of_two(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Serialized size without materializing the bytes.
struct CountingBuf : std::streambuf {
    int64_t count = 0;
    std::streamsize xsputn(const char* /*s*/, std::streamsize len) override {
        count += len;
        return len;
    }
    int overflow(int c) override {
        if (c != EOF) ++count;
        return c;
    }
};

template <typename Index>
int64_t serialized_bytes(const Index& index, const RotationSpec& rot) {
    CountingBuf buf;
    std::ostream out(&buf);
    save_index(out, index, rot);
    return buf.count;
}

struct QueryStats {
    double rotation_s = 0.0, probe_s = 0.0, rerank_s = 0.0;
    void add(const QueryResult::Timings& t) {
        rotation_s += t.rotation_s;
        probe_s += t.probe_s;
        rerank_s += t.rerank_s;
    }
};

std::vector<int32_t> result_ids(const QueryResult& r) {
    std::vector<int32_t> ids(r.entries.size());
    for (size_t i = 0; i < ids.size(); ++i) ids[i] = r.entries[i].first;
    return ids;
}

// Code-scan baselines: estimate all n inner products from binary codes,
// keep the best b, rerank exactly.
QueryResult query_code_scan(const std::vector<BinaryCode>& codes, const BinaryCode& qcode,
                            const VectorSet& data, const Vector& query, int b, int k) {
    StopWatch watch;
    detail::TopBHeap heap(std::min<int>(b, static_cast<int>(codes.size())));
    for (int32_t id = 0; id < static_cast<int32_t>(codes.size()); ++id)
        heap.offer(id, simhash_estimate(codes[static_cast<size_t>(id)], qcode));
    auto ranked = heap.take_sorted();
    std::vector<int32_t> candidates(ranked.size());
    for (size_t i = 0; i < ranked.size(); ++i) candidates[i] = ranked[i].first;
    const double probe_s = watch.seconds();

    QueryResult result = rerank(candidates, data, query, k);
    result.timings.probe_s = probe_s;
    return result;
}

}  // namespace

BenchConfig parse_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config: " + path);
    BenchConfig cfg;
    bool query_format_set = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        try {
            if (key == "data") cfg.data_path = value;
            else if (key == "format" || key == "data_format") cfg.data_format = parse_format(value);
            else if (key == "queries") cfg.query_path = value;
            else if (key == "query_format") {
                cfg.query_format = parse_format(value);
                query_format_set = true;
            }
            else if (key == "k") cfg.k = std::stoi(value);
            else if (key == "b") cfg.b = std::stoi(value);
            else if (key == "D") cfg.D = std::stoi(value);
            else if (key == "s0") cfg.s0 = std::stoi(value);
            else if (key == "sprime") cfg.sprime = std::stoi(value);
            else if (key == "B") cfg.B = std::stoll(value);
            else if (key == "m") cfg.m = std::stoi(value);
            else if (key == "l") cfg.l = std::stoi(value);
            else if (key == "rotation") cfg.rotation = value;
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "repeats") cfg.repeats = std::stoi(value);
            else if (key == "threads") cfg.threads = std::stoi(value);
            else if (key == "normalize_queries") cfg.normalize_queries = (value == "1" || value == "true");
            else if (key == "out_json") cfg.out_json = value;
            else if (key == "out_csv") cfg.out_csv = value;
            else if (key == "gt_cache") cfg.gt_cache = value;
            else if (key == "algo") {
                AlgoSpec spec;
                std::stringstream ss(value);
                ss >> spec.name;
                std::string token;
                while (ss >> token) {
                    const size_t te = token.find('=');
                    if (te == std::string::npos)
                        throw FormatError(path + ":" + std::to_string(line_no) +
                                          ": expected key=value, got '" + token + "'");
                    const std::string pk = token.substr(0, te);
                    const std::string pv = token.substr(te + 1);
                    if (pk == "D") spec.D = std::stoi(pv);
                    else if (pk == "s0") spec.s0 = std::stoi(pv);
                    else if (pk == "sprime") spec.sprime = std::stoi(pv);
                    else if (pk == "b") spec.b = std::stoi(pv);
                    else if (pk == "l") spec.l = std::stoi(pv);
                    else if (pk == "m") spec.m = std::stoi(pv);
                    else if (pk == "B") spec.B = std::stoll(pv);
                    else
                        throw FormatError(path + ":" + std::to_string(line_no) +
                                          ": unknown algo parameter '" + pk + "'");
                }
                if (spec.name.empty())
                    throw FormatError(path + ":" + std::to_string(line_no) + ": empty algo line");
                cfg.algos.push_back(std::move(spec));
            } else {
                throw FormatError(path + ":" + std::to_string(line_no) + ": unknown key '" + key +
                                  "'");
            }
        } catch (const std::invalid_argument&) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": bad value for '" + key +
                              "'");
        }
    }
    if (!query_format_set) cfg.query_format = cfg.data_format;
    return cfg;
}

BenchmarkReport run_benchmark(const BenchConfig& config) {
    if (config.data_path.empty()) throw ParamError("run_benchmark: no data path configured");
    const VectorSet data = load_vectors(config.data_path, config.data_format);
    const VectorSet queries = load_vectors(config.query_path, config.query_format);
    BenchConfig cfg = config;
    if (cfg.gt_cache.empty()) cfg.gt_cache = cfg.data_path + ".gt.cache";
    return run_benchmark(cfg, data, queries, checksum_file(config.data_path),
                         checksum_file(config.query_path));
}

BenchmarkReport run_benchmark(const BenchConfig& config, const VectorSet& data,
                              const VectorSet& queries_in, uint64_t data_checksum,
                              uint64_t query_checksum) {
    if (data.size() == 0) throw ParamError("run_benchmark: empty data set");
    if (queries_in.size() == 0) throw ParamError("run_benchmark: empty query set");
    if (queries_in.dim() != data.dim())
        throw ParamError("run_benchmark: data and queries disagree on dimension");
    set_num_threads(std::max(1, config.threads));

    VectorSet queries = queries_in;
    if (config.normalize_queries) {
        for (int q = 0; q < queries.size(); ++q) {
            const double norm = std::sqrt(
                dot_exact(queries.points.col(q).data(), queries.points.col(q).data(), queries.dim()));
            if (norm > 0.0)
                queries.points.col(q) = (queries.points.col(q).cast<double>() / norm).cast<float>();
        }
    }

    const int n = data.size();
    const int nq = queries.size();
    const int k = std::min(config.k, n);

    BenchmarkReport report;
    report.n = n;
    report.d = data.dim();
    report.n_queries = nq;
    report.k = k;
    report.repeats = config.repeats;
    report.seed = config.seed;

    std::vector<int32_t> truth;
    if (!config.gt_cache.empty())
        truth = compute_groundtruth_cached(data, queries, k, config.gt_cache, data_checksum,
                                           query_checksum);
    else
        truth = compute_groundtruth(data, queries, k);
    auto truth_row = [&](int q) {
        return std::span<const int32_t>(truth.data() + static_cast<size_t>(q) * k,
                                        static_cast<size_t>(k));
    };

    // Brute force is the speedup denominator and is always measured.
    double brute_total_s = 0.0;
    for (int rep = 0; rep < config.repeats; ++rep)
        for (int q = 0; q < nq; ++q)
            brute_total_s += brute_force_topk(data, queries.col(q), k).timings.total();
    const double brute_mean_s = brute_total_s / (config.repeats * nq);
    report.bruteforce_query_ms = brute_mean_s * 1e3;

    for (const AlgoSpec& spec : config.algos) {
        ResolvedParams p;
        p.k = k;
        p.D = spec.D ? spec.D : (config.D ? config.D : next_power_of_two(data.dim()));
        p.s0 = spec.s0 ? spec.s0 : config.s0;
        p.sprime = spec.sprime ? spec.sprime : config.sprime;
        p.b = std::min(spec.b ? spec.b : config.b, n);
        p.l = spec.l ? spec.l : config.l;
        p.B = spec.B ? spec.B : (config.B ? config.B : std::max<int64_t>(n / 100, p.sprime));
        p.m = spec.m ? spec.m
                     : (config.m ? config.m
                                 : static_cast<int>((p.B + p.sprime - 1) / p.sprime));
        if (p.b < k) p.b = k;

        AlgoReport row;
        row.name = spec.name;
        row.params = p;
        row.seed = config.seed;

        const bool needs_rotation = spec.name != "bruteforce" && spec.name != "simhash" &&
                                    spec.name != "simplelsh";
        RotationSpec rot;
        ProjectedMatrix pm;
        StopWatch build_watch;
        if (needs_rotation) {
            const RotationKind kind = config.rotation == "gaussian" ? RotationKind::gaussian
                                                                    : RotationKind::spinner;
            rot = make_rotation(kind, config.seed, data.dim(), p.D);
            p.D = rot.D;
            row.params.D = rot.D;
            pm = project_all(rot, data);
        }

        // Build once; queries repeat. The per-query work is timed from the
        // QueryResult phase breakdown so index construction stays excluded.
        QueryStats stats;
        double sum_precision = 0.0;
        auto run_queries = [&](auto&& one_query) {
            for (int rep = 0; rep < config.repeats; ++rep) {
                for (int q = 0; q < nq; ++q) {
                    const QueryResult result = one_query(q);
                    stats.add(result.timings);
                    if (rep == 0)
                        sum_precision += precision_at_b(result_ids(result), truth_row(q));
                }
            }
        };

        if (spec.name == "bruteforce") {
            row.build_s = 0.0;
            run_queries([&](int q) { return brute_force_topk(data, queries.col(q), k); });
        } else if (spec.name == "1ceos" || spec.name == "2ceos") {
            const bool two_sided = spec.name == "2ceos";
            build_watch.reset();
            OneCeosIndex index = build_1ceos(pm, p.b, two_sided);
            row.build_s = build_watch.seconds();
            row.index_bytes = serialized_bytes(index, rot);
            run_queries(
                [&](int q) { return query_1ceos(index, data, rot, queries.col(q), k, two_sided); });
        } else if (spec.name == "sceos") {
            build_watch.reset();
            SceosFullIndex index;
            try {
                index = build_sceos_full(pm, p.s0, p.b);
            } catch (const CapacityError& e) {
                throw CapacityError(std::string("benchmark algo 'sceos': ") + e.what());
            }
            row.build_s = build_watch.seconds();
            row.index_bytes = serialized_bytes(index, rot);
            run_queries(
                [&](int q) { return query_sceos_full(index, data, rot, queries.col(q), k); });
        } else if (spec.name == "sceos-est") {
            row.build_s = 0.0;  // the projection is the whole index
            row.index_bytes =
                static_cast<int64_t>(sizeof(float)) * pm.D * static_cast<int64_t>(pm.n);
            run_queries(
                [&](int q) { return query_sceos_est(pm, data, rot, queries.col(q), p.s0, p.b, k); });
        } else if (spec.name == "sceos-ta") {
            build_watch.reset();
            SceosTaIndex index = build_sceos_ta(std::move(pm));
            row.build_s = build_watch.seconds();
            row.index_bytes = serialized_bytes(index, rot);
            run_queries([&](int q) {
                return query_sceos_ta(index, data, rot, queries.col(q), p.s0, p.b, k);
            });
        } else if (spec.name == "coceos") {
            build_watch.reset();
            CoCeosIndex index = build_coceos(pm, p.m);
            row.build_s = build_watch.seconds();
            row.index_bytes = serialized_bytes(index, rot);
            run_queries([&](int q) {
                return query_coceos(index, data, rot, queries.col(q), p.sprime, p.B, p.b, k);
            });
        } else if (spec.name == "simhash" || spec.name == "simplelsh") {
            const bool transformed = spec.name == "simplelsh";
            build_watch.reset();
            VectorSet encoded_set;
            if (transformed) encoded_set = simplelsh_transform(data).points;
            const VectorSet& code_source = transformed ? encoded_set : data;
            SimHashCoder coder(code_source.dim(), p.l, config.seed);
            std::vector<BinaryCode> codes(static_cast<size_t>(n));
            parallel_for(n, [&](int64_t j) {
                codes[static_cast<size_t>(j)] = coder.encode(code_source.col(static_cast<int>(j)));
            });
            row.build_s = build_watch.seconds();
            row.index_bytes = static_cast<int64_t>(n) * ((p.l + 63) / 64) * 8;
            run_queries([&](int q) {
                Vector query = queries.col(q);
                StopWatch encode_watch;
                Vector hash_input = query;
                if (transformed) {
                    const double norm = std::sqrt(dot_exact(query, query));
                    if (norm == 0.0) throw ParamError("simplelsh: zero-norm query");
                    hash_input = simplelsh_transform_query(
                        Vector((query.cast<double>() / norm).cast<float>()));
                }
                const BinaryCode qcode = coder.encode(hash_input);
                const double encode_s = encode_watch.seconds();
                QueryResult result = query_code_scan(codes, qcode, data, query, p.b, k);
                result.timings.rotation_s = encode_s;
                return result;
            });
        } else {
            throw ParamError("run_benchmark: unknown algorithm '" + spec.name + "'");
        }

        const double denom = static_cast<double>(config.repeats) * nq;
        row.mean_rotation_ms = stats.rotation_s / denom * 1e3;
        row.mean_probe_ms = stats.probe_s / denom * 1e3;
        row.mean_rerank_ms = stats.rerank_s / denom * 1e3;
        row.mean_query_ms = row.mean_rotation_ms + row.mean_probe_ms + row.mean_rerank_ms;
        row.mean_p_at_b = sum_precision / nq;
        row.speedup = row.mean_query_ms > 0.0 ? report.bruteforce_query_ms / row.mean_query_ms : 0.0;
        report.algorithms.push_back(std::move(row));
    }

    if (!config.out_json.empty()) write_report_json(report, config.out_json);
    if (!config.out_csv.empty()) write_report_csv(report, config.out_csv);
    return report;
}

void write_report_json(const BenchmarkReport& report, const std::string& path) {
    nlohmann::json j;
    j["n"] = report.n;
    j["d"] = report.d;
    j["queries"] = report.n_queries;
    j["k"] = report.k;
    j["repeats"] = report.repeats;
    j["seed"] = report.seed;
    j["timings"]["bruteforce_query_ms"] = report.bruteforce_query_ms;
    for (const auto& row : report.algorithms) {
        nlohmann::json a;
        a["name"] = row.name;
        a["params"] = {{"D", row.params.D}, {"s0", row.params.s0},     {"sprime", row.params.sprime},
                       {"b", row.params.b}, {"l", row.params.l},       {"m", row.params.m},
                       {"k", row.params.k}, {"B", row.params.B}};
        a["p_at_b"] = row.mean_p_at_b;
        a["index_bytes"] = row.index_bytes;
        a["seed"] = row.seed;
        a["timings"] = {{"query_ms", row.mean_query_ms},
                        {"rotation_ms", row.mean_rotation_ms},
                        {"probe_ms", row.mean_probe_ms},
                        {"rerank_ms", row.mean_rerank_ms},
                        {"build_s", row.build_s},
                        {"speedup", row.speedup}};
        j["algorithms"].push_back(std::move(a));
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

void write_report_csv(const BenchmarkReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "algo,D,s0,sprime,B,m,l,b,k,p_at_b,query_ms,speedup,build_s,index_bytes,seed\n";
    char buf[512];
    for (const auto& row : report.algorithms) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%d,%d,%d,%lld,%d,%d,%d,%d,%.6f,%.6f,%.3f,%.3f,%lld,%llu\n",
                      row.name.c_str(), row.params.D, row.params.s0, row.params.sprime,
                      static_cast<long long>(row.params.B), row.params.m, row.params.l,
                      row.params.b, row.params.k, row.mean_p_at_b, row.mean_query_ms, row.speedup,
                      row.build_s, static_cast<long long>(row.index_bytes),
                      static_cast<unsigned long long>(row.seed));
        out << buf;
    }
}

}  // namespace ceos
