// End-to-end tests of the ceos binary: exit codes, determinism of output
// artifacts, metadata validation, and cross-checks against the library.

#include "ceos/dataset.hpp"
#include "ceos/indexes.hpp"
#include "ceos/serialize.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;

#define CHECK_MSG(cond, msg)                                                              \
    do {                                                                                  \
        if (!(cond)) {                                                                    \
            ++g_failures;                                                                 \
            std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << "  " << (msg) << "\n"; \
        }                                                                                 \
    } while (0)

int run(const std::string& args, std::string* output = nullptr) {
    const std::string log = "cli_out.log";
    const std::string cmd = std::string(CEOS_CLI_PATH) + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(log);
        std::stringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_csv_points(const std::string& path, int n, int d) {
    std::ofstream out(path);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < d; ++i) out << (i ? "," : "") << ((j * 7 + i * 3) % 11) - 5;
        out << "\n";
    }
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "ceos_cli_tests";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto old_cwd = fs::current_path();
    fs::current_path(dir);

    std::string out;

    // --- synth determinism -------------------------------------------------
    CHECK_MSG(run("synth --n 2000 --d 24 --queries 10 --gap 0.5 --seed 5 --out a") == 0, "synth a");
    CHECK_MSG(run("synth --n 2000 --d 24 --queries 10 --gap 0.5 --seed 5 --out b") == 0, "synth b");
    CHECK_MSG(slurp("a.data.raw") == slurp("b.data.raw"), "synth data deterministic");
    CHECK_MSG(slurp("a.queries.raw") == slurp("b.queries.raw"), "synth queries deterministic");

    // --- build: metadata, determinism, capacity guard ----------------------
    write_csv_points("ten.csv", 10, 4);
    CHECK_MSG(run("build --data ten.csv --format csv --algo 1ceos --b 5 --index ten.idx "
                  "--seed 3") == 0,
              "build 1ceos");
    {
        std::ifstream meta_in("ten.idx.meta.json");
        CHECK_MSG(meta_in.good(), "metadata sidecar exists");
        json meta;
        meta_in >> meta;
        CHECK_MSG(meta.at("n") == 10, "metadata n=10");
        CHECK_MSG(meta.at("algorithm") == "1ceos", "metadata algorithm");
    }
    CHECK_MSG(run("build --data ten.csv --format csv --algo 1ceos --b 5 --index ten2.idx "
                  "--seed 3") == 0,
              "rebuild 1ceos");
    CHECK_MSG(slurp("ten.idx") == slurp("ten2.idx"), "rebuild is byte-identical");

    CHECK_MSG(run("build --data ten.csv --format csv --algo sceos --D 1024 --s0 5 "
                  "--index cap.idx --seed 3",
                  &out) == 4,
              "full sceos capacity guard exits 4");
    CHECK_MSG(out.find("capacity error") != std::string::npos, "capacity error names itself");

    // --- config echo -------------------------------------------------------
    CHECK_MSG(run("build --data ten.csv --format csv --algo sceos-ta --index ta.idx --seed 3",
                  &out) == 0,
              "build sceos-ta");
    CHECK_MSG(out.find("config build") != std::string::npos, "resolved config printed");
    CHECK_MSG(out.find("\"seed\":3") != std::string::npos, "seed echoed");

    // --- query: happy path, determinism, cross-check, errors ---------------
    CHECK_MSG(run("synth --n 500 --d 16 --queries 8 --seed 9 --out toy") == 0, "synth toy");
    CHECK_MSG(run("build --data toy.data.raw --format raw-f32 --algo 1ceos --b 20 "
                  "--index toy.idx --seed 11") == 0,
              "build toy index");
    CHECK_MSG(run("query --index toy.idx --data toy.data.raw --format raw-f32 "
                  "--queries toy.queries.raw --k 1 --out res1.csv --seed 11") == 0,
              "query k=1");
    CHECK_MSG(run("query --index toy.idx --data toy.data.raw --format raw-f32 "
                  "--queries toy.queries.raw --k 1 --out res2.csv --seed 11") == 0,
              "query again");
    CHECK_MSG(slurp("res1.csv") == slurp("res2.csv"), "query artifact deterministic");

    {
        // Cross-check every row against the library path.
        const ceos::VectorSet data = ceos::load_vectors("toy.data.raw", ceos::FileFormat::raw_f32);
        const ceos::VectorSet queries =
            ceos::load_vectors("toy.queries.raw", ceos::FileFormat::raw_f32);
        const ceos::LoadedIndex li = ceos::load_index_file("toy.idx");
        const auto& index = std::get<ceos::OneCeosIndex>(li.index);

        std::ifstream in("res1.csv");
        std::string header, line;
        std::getline(in, header);
        int rows = 0;
        while (std::getline(in, line)) {
            int query_id = 0, rank = 0, id = 0;
            double value = 0.0;
            CHECK_MSG(std::sscanf(line.c_str(), "%d,%d,%d,%lf", &query_id, &rank, &id, &value) == 4,
                      "csv row parses");
            const ceos::QueryResult expected =
                ceos::query_1ceos(index, data, li.rotation, queries.col(query_id), 1);
            CHECK_MSG(expected.entries[0].first == id, "row id matches library");
            CHECK_MSG(expected.entries[0].second == value, "row value matches library");
            ++rows;
        }
        CHECK_MSG(rows == 8, "one row per query");
    }

    // k > b is a parameter error.
    CHECK_MSG(run("query --index toy.idx --data toy.data.raw --format raw-f32 "
                  "--queries toy.queries.raw --k 30 --out over.csv --seed 11",
                  &out) == 2,
              "k > b exits 2");

    // Metadata mismatch: query against different data.
    CHECK_MSG(run("synth --n 500 --d 16 --queries 8 --seed 10 --out other") == 0, "synth other");
    CHECK_MSG(run("query --index toy.idx --data other.data.raw --format raw-f32 "
                  "--queries toy.queries.raw --k 1 --out bad.csv --seed 11",
                  &out) == 2,
              "checksum mismatch exits 2");
    CHECK_MSG(out.find("data_checksum") != std::string::npos, "mismatch names the field");

    // Zero queries: empty results file, exit 0.
    {
        std::ofstream empty("none.raw", std::ios::binary);
        const uint64_t zero = 0, d16 = 16;
        empty.write(reinterpret_cast<const char*>(&zero), 8);
        empty.write(reinterpret_cast<const char*>(&d16), 8);
    }
    CHECK_MSG(run("query --index toy.idx --data toy.data.raw --format raw-f32 "
                  "--queries none.raw --query-format raw-f32 --k 1 --out none.csv --seed 11") == 0,
              "zero queries exit 0");
    CHECK_MSG(slurp("none.csv") == "query,rank,id,inner_product\n", "zero queries empty rows");

    // Unknown flags are rejected.
    CHECK_MSG(run("query --definitely-not-a-flag 1", &out) == 2, "unknown flag exits 2");

    // Unreadable data is a format error.
    CHECK_MSG(run("build --data missing.raw --format raw-f32 --algo 1ceos --index x.idx",
                  &out) == 3,
              "missing file exits 3");

    // --- groundtruth idempotence -------------------------------------------
    CHECK_MSG(run("groundtruth --data toy.data.raw --format raw-f32 --queries toy.queries.raw "
                  "--k 5 --out gt1.csv") == 0,
              "groundtruth 1");
    CHECK_MSG(run("groundtruth --data toy.data.raw --format raw-f32 --queries toy.queries.raw "
                  "--k 5 --out gt2.csv") == 0,
              "groundtruth 2");
    CHECK_MSG(slurp("gt1.csv") == slurp("gt2.csv"), "groundtruth deterministic");

    // --- bench smoke + planted-gap regime -----------------------------------
    CHECK_MSG(run("synth --n 10000 --d 64 --queries 40 --gap 0.5 --seed 31 --out big") == 0,
              "synth big");
    CHECK_MSG(run("bench --data big.data.raw --format raw-f32 --queries big.queries.raw "
                  "--algo bruteforce --algo sceos-est --algo sceos-ta --algo coceos "
                  "--k 10 --b 100 --s0 5 --D 128 --repeats 2 --seed 31 --out rep") == 0,
              "bench runs");
    {
        std::ifstream in("rep.json");
        CHECK_MSG(in.good(), "bench json written");
        json rep;
        in >> rep;
        CHECK_MSG(rep.at("algorithms").size() == 4, "bench rows");
        double est_p = -1.0, ta_p = -2.0;
        for (const auto& row : rep.at("algorithms")) {
            const double p = row.at("p_at_b").get<double>();
            CHECK_MSG(p >= 0.0 && p <= 1.0, "p@b in [0,1]");
            if (row.at("name") == "sceos-est") est_p = p;
            if (row.at("name") == "sceos-ta") {
                ta_p = p;
                CHECK_MSG(p >= 0.9, "sceos-ta reaches 0.9 on the planted instance");
            }
        }
        CHECK_MSG(est_p == ta_p, "est and TA share P@b");

        std::ifstream csv("rep.csv");
        std::string line;
        std::getline(csv, line);
        CHECK_MSG(line == "algo,D,s0,sprime,B,m,l,b,k,p_at_b,query_ms,speedup,build_s,index_bytes,seed",
                  "csv header schema");
        int rows = 0;
        while (std::getline(csv, line)) ++rows;
        CHECK_MSG(rows == 4, "csv rows");
    }

    // Same bench through a config file.
    {
        std::ofstream cfg("bench.cfg");
        cfg << "data = big.data.raw\n"
               "format = raw-f32\n"
               "queries = big.queries.raw\n"
               "k = 10\nb = 100\ns0 = 5\nD = 128\nrepeats = 1\nseed = 31\n"
               "out_json = rep2.json\nout_csv = rep2.csv\n"
               "algo = bruteforce\n"
               "algo = sceos-ta s0=5 b=100\n";
    }
    CHECK_MSG(run("bench --config bench.cfg") == 0, "bench with config file");
    {
        std::ifstream in("rep2.json");
        json rep;
        in >> rep;
        CHECK_MSG(rep.at("algorithms").size() == 2, "config bench rows");
        CHECK_MSG(rep.at("seed") == 31, "config seed used");
    }

    fs::current_path(old_cwd);
    fs::remove_all(dir);

    if (g_failures == 0) {
        std::cout << "cli_tests: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_tests: " << g_failures << " checks failed\n";
    return 1;
}
