#include "ceos/dataset.hpp"

#include "ceos/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace ceos {

FileFormat parse_format(const std::string& name) {
    if (name == "fvecs") return FileFormat::fvecs;
    if (name == "csv") return FileFormat::csv;
    if (name == "raw-f32") return FileFormat::raw_f32;
    throw ParamError("unknown format '" + name + "' (expected fvecs, csv or raw-f32)");
}

const char* format_name(FileFormat f) {
    switch (f) {
        case FileFormat::fvecs: return "fvecs";
        case FileFormat::csv: return "csv";
        case FileFormat::raw_f32: return "raw-f32";
    }
    return "?";
}

namespace {

void check_finite(const Matrix& m, const std::string& path) {
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j)))
                throw FormatError(path + ": non-finite value in record " + std::to_string(j));
}

VectorSet load_fvecs(std::ifstream& in, const std::string& path) {
    std::vector<float> values;
    int d = -1;
    int record = 0;
    for (;;) {
        int32_t dim = 0;
        in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
        if (in.eof() && in.gcount() == 0) break;
        if (!in || dim <= 0)
            throw FormatError(path + ": bad record header at record " + std::to_string(record));
        if (d < 0) d = dim;
        if (dim != d)
            throw FormatError(path + ": record " + std::to_string(record) + " has dim " +
                              std::to_string(dim) + ", expected " + std::to_string(d));
        const size_t old = values.size();
        values.resize(old + static_cast<size_t>(dim));
        in.read(reinterpret_cast<char*>(values.data() + old),
                static_cast<std::streamsize>(sizeof(float)) * dim);
        if (!in) throw FormatError(path + ": truncated record " + std::to_string(record));
        ++record;
    }
    VectorSet set;
    if (record == 0) return set;
    set.points.resize(d, record);
    std::memcpy(set.points.data(), values.data(), values.size() * sizeof(float));
    return set;
}

VectorSet load_csv(std::ifstream& in, const std::string& path) {
    std::vector<std::vector<float>> rows;
    std::string line;
    int record = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<float> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                size_t used = 0;
                row.push_back(std::stof(cell, &used));
            } catch (const std::exception&) {
                throw FormatError(path + ": unparsable value '" + cell + "' in record " +
                                  std::to_string(record));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw FormatError(path + ": record " + std::to_string(record) + " has dim " +
                              std::to_string(row.size()) + ", expected " +
                              std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
        ++record;
    }
    VectorSet set;
    if (rows.empty()) return set;
    set.points.resize(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (size_t j = 0; j < rows.size(); ++j)
        for (size_t i = 0; i < rows[j].size(); ++i)
            set.points(static_cast<int>(i), static_cast<int>(j)) = rows[j][i];
    return set;
}

VectorSet load_raw(std::ifstream& in, const std::string& path) {
    uint64_t n = 0, d = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    if (in.eof() && in.gcount() == 0) return {};  // empty file -> empty set
    in.read(reinterpret_cast<char*>(&d), sizeof(d));
    if (!in) throw FormatError(path + ": truncated raw-f32 header");
    VectorSet set;
    if (n == 0) return set;
    if (d == 0) throw FormatError(path + ": raw-f32 header has d = 0");
    set.points.resize(static_cast<int>(d), static_cast<int>(n));
    in.read(reinterpret_cast<char*>(set.points.data()),
            static_cast<std::streamsize>(n * d * sizeof(float)));
    if (!in) throw FormatError(path + ": truncated raw-f32 payload");
    return set;
}

}  // namespace

VectorSet load_vectors(const std::string& path, FileFormat format) {
    std::ifstream in(path, format == FileFormat::csv ? std::ios::in : std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);
    VectorSet set;
    switch (format) {
        case FileFormat::fvecs: set = load_fvecs(in, path); break;
        case FileFormat::csv: set = load_csv(in, path); break;
        case FileFormat::raw_f32: set = load_raw(in, path); break;
    }
    check_finite(set.points, path);
    return set;
}

void save_vectors(const std::string& path, const VectorSet& set, FileFormat format) {
    std::ofstream out(path, format == FileFormat::csv ? std::ios::out : std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    const int d = set.dim();
    const int n = set.size();
    switch (format) {
        case FileFormat::fvecs:
            for (int j = 0; j < n; ++j) {
                const int32_t dim = d;
                out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
                out.write(reinterpret_cast<const char*>(set.points.col(j).data()),
                          static_cast<std::streamsize>(sizeof(float)) * d);
            }
            break;
        case FileFormat::csv: {
            char buf[64];
            for (int j = 0; j < n; ++j) {
                std::string line;
                for (int i = 0; i < d; ++i) {
                    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(set.points(i, j)));
                    if (i) line += ',';
                    line += buf;
                }
                line += '\n';
                out << line;
            }
            break;
        }
        case FileFormat::raw_f32: {
            const uint64_t un = static_cast<uint64_t>(n), ud = static_cast<uint64_t>(d);
            out.write(reinterpret_cast<const char*>(&un), sizeof(un));
            out.write(reinterpret_cast<const char*>(&ud), sizeof(ud));
            out.write(reinterpret_cast<const char*>(set.points.data()),
                      static_cast<std::streamsize>(un * ud * sizeof(float)));
            break;
        }
    }
    if (!out) throw FormatError("write failed: " + path);
}

std::vector<int32_t> compute_groundtruth(const VectorSet& data, const VectorSet& queries, int k) {
    if (k < 1 || k > data.size()) throw ParamError("compute_groundtruth: k out of range");
    std::vector<int32_t> truth(static_cast<size_t>(queries.size()) * k);
    parallel_for(queries.size(), [&](int64_t q) {
        const QueryResult result = brute_force_topk(data, queries.col(static_cast<int>(q)), k);
        for (int i = 0; i < k; ++i)
            truth[static_cast<size_t>(q) * k + i] = result.entries[static_cast<size_t>(i)].first;
    });
    return truth;
}

std::vector<int32_t> compute_groundtruth(Dataset& dataset, int k) {
    dataset.ground_truth = compute_groundtruth(dataset.data, dataset.queries, k);
    dataset.gt_k = k;
    return dataset.ground_truth;
}

namespace {
constexpr char kGtMagic[8] = {'C', 'E', 'O', 'S', 'G', 'T', '0', '\0'};
}

std::vector<int32_t> compute_groundtruth_cached(const VectorSet& data, const VectorSet& queries,
                                                int k, const std::string& cache_path,
                                                uint64_t data_checksum, uint64_t query_checksum,
                                                bool* cache_hit) {
    if (cache_hit) *cache_hit = false;
    {
        std::ifstream in(cache_path, std::ios::binary);
        if (in) {
            char magic[8];
            uint64_t dc = 0, qc = 0, ck = 0, cq = 0;
            in.read(magic, sizeof(magic));
            in.read(reinterpret_cast<char*>(&dc), sizeof(dc));
            in.read(reinterpret_cast<char*>(&qc), sizeof(qc));
            in.read(reinterpret_cast<char*>(&ck), sizeof(ck));
            in.read(reinterpret_cast<char*>(&cq), sizeof(cq));
            if (in && std::memcmp(magic, kGtMagic, sizeof(kGtMagic)) == 0 && dc == data_checksum &&
                qc == query_checksum && ck == static_cast<uint64_t>(k) &&
                cq == static_cast<uint64_t>(queries.size())) {
                std::vector<int32_t> truth(static_cast<size_t>(queries.size()) * k);
                in.read(reinterpret_cast<char*>(truth.data()),
                        static_cast<std::streamsize>(truth.size() * sizeof(int32_t)));
                if (in) {
                    if (cache_hit) *cache_hit = true;
                    return truth;
                }
            }
        }
    }
    auto truth = compute_groundtruth(data, queries, k);
    std::ofstream out(cache_path, std::ios::binary);
    if (out) {
        out.write(kGtMagic, sizeof(kGtMagic));
        const uint64_t ck = static_cast<uint64_t>(k), cq = static_cast<uint64_t>(queries.size());
        out.write(reinterpret_cast<const char*>(&data_checksum), sizeof(data_checksum));
        out.write(reinterpret_cast<const char*>(&query_checksum), sizeof(query_checksum));
        out.write(reinterpret_cast<const char*>(&ck), sizeof(ck));
        out.write(reinterpret_cast<const char*>(&cq), sizeof(cq));
        out.write(reinterpret_cast<const char*>(truth.data()),
                  static_cast<std::streamsize>(truth.size() * sizeof(int32_t)));
    }
    return truth;
}

double precision_at_b(std::span<const int32_t> retrieved, std::span<const int32_t> truth) {
    if (truth.empty()) throw ParamError("precision_at_b: empty truth set");
    std::unordered_set<int32_t> wanted(truth.begin(), truth.end());
    int hits = 0;
    for (int32_t id : retrieved) hits += wanted.count(id) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Dataset synthesize(const SynthConfig& config) {
    if (config.n < config.n_queries * config.planted_per_query + 1)
        throw ParamError("synthesize: n too small for the planted structure");
    if (config.d < 2 || config.clusters < 1 || config.n_queries < 1)
        throw ParamError("synthesize: bad parameters");

    rng::Stream stream(rng::mix(config.seed, rng::kSynthTag));
    const int d = config.d;

    auto random_unit = [&] {
        Vector v(d);
        for (int i = 0; i < d; ++i) v[i] = static_cast<float>(stream.next_gaussian());
        const double norm = std::sqrt(dot_exact(v, v));
        return Vector((v.cast<double>() / norm).cast<float>());
    };

    // Background points: clustered unit vectors scaled so the expected
    // maximum background inner product against a random unit query is
    // roughly tau1 - gap.
    std::vector<Vector> centers(static_cast<size_t>(config.clusters));
    for (auto& c : centers) c = random_unit();

    const double typical_max =
        std::sqrt(2.0 * std::log(static_cast<double>(std::max(config.n, 2))) / d);
    const double background_scale =
        std::clamp((config.tau1 - config.gap) / typical_max, 0.05, 1.0);

    Dataset out;
    out.data.points.resize(d, config.n);
    out.queries.points.resize(d, config.n_queries);

    for (int q = 0; q < config.n_queries; ++q) out.queries.points.col(q) = random_unit();

    const int planted_total = config.n_queries * config.planted_per_query;
    // Planted ids are spread over the whole range so indexes cannot profit
    // from their position.
    const int stride = config.n / planted_total;
    std::vector<char> is_planted(static_cast<size_t>(config.n), 0);
    int cursor = 0;
    for (int q = 0; q < config.n_queries; ++q) {
        const Vector query = out.queries.col(q);
        for (int p = 0; p < config.planted_per_query; ++p) {
            const double tau =
                config.tau1 - 0.05 * p / std::max(1, config.planted_per_query - 1);
            // Unit point with an exact inner product tau against the query.
            Vector noise = random_unit();
            const double along = dot_exact(noise, query);
            Eigen::VectorXd ortho = noise.cast<double>() - along * query.cast<double>();
            ortho /= std::sqrt(ortho.dot(ortho));
            Eigen::VectorXd planted =
                tau * query.cast<double>() + std::sqrt(1.0 - tau * tau) * ortho;
            const int id = cursor;
            cursor += stride;
            out.data.points.col(id) = planted.cast<float>();
            is_planted[static_cast<size_t>(id)] = 1;
        }
    }
    for (int j = 0; j < config.n; ++j) {
        if (is_planted[static_cast<size_t>(j)]) continue;
        double scale = background_scale;
        if (config.head_fraction > 0.0 && stream.next_unit() >= config.head_fraction)
            scale *= config.bulk_scale;
        const Vector& center = centers[static_cast<size_t>(j) % centers.size()];
        Vector v(d);
        for (int i = 0; i < d; ++i)
            v[i] = center[i] + 0.3f * static_cast<float>(stream.next_gaussian());
        const double norm = std::sqrt(dot_exact(v, v));
        out.data.points.col(j) = (v.cast<double>() * (scale / norm)).cast<float>();
    }
    return out;
}

uint64_t checksum_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);
    char buf[1 << 16];
    uint64_t h = 0xcbf29ce484222325ULL;
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a(buf, static_cast<size_t>(in.gcount()), h);
    }
    return h;
}

uint64_t checksum_matrix(const Matrix& m) {
    return fnv1a(m.data(), static_cast<size_t>(m.rows()) * static_cast<size_t>(m.cols()) *
                               sizeof(float));
}

}  // namespace ceos
