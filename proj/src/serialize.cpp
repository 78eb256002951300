#include "ceos/serialize.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace ceos {

namespace {

constexpr char kMagic[8] = {'C', 'E', 'O', 'S', 'I', 'D', 'X', '\0'};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw FormatError("index file truncated");
}

template <typename T>
void write_array(std::ostream& out, const T* data, size_t count) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void read_array(std::istream& in, T* data, size_t count) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
    if (!in) throw FormatError("index file truncated");
}

void write_header(std::ostream& out, IndexAlgo algo, int d, int D, int n,
                  const RotationSpec& rot) {
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kIndexFormatVersion);
    write_pod(out, static_cast<uint32_t>(algo));
    write_pod(out, static_cast<uint64_t>(d));
    write_pod(out, static_cast<uint64_t>(D));
    write_pod(out, static_cast<uint64_t>(n));
    write_pod(out, static_cast<uint8_t>(rot.kind));
    write_pod(out, rot.seed);
}

struct Header {
    IndexAlgo algo;
    int d, D, n;
    RotationKind kind;
    uint64_t seed;
};

Header read_header(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("not a CEOS index file (bad magic)");
    uint32_t version = 0;
    read_pod(in, version);
    if (version != kIndexFormatVersion)
        throw FormatError("unsupported index format version " + std::to_string(version));
    uint32_t tag = 0;
    read_pod(in, tag);
    if (tag < 1 || tag > 4) throw FormatError("unknown algorithm tag " + std::to_string(tag));
    uint64_t d = 0, D = 0, n = 0;
    read_pod(in, d);
    read_pod(in, D);
    read_pod(in, n);
    uint8_t kind = 0;
    uint64_t seed = 0;
    read_pod(in, kind);
    read_pod(in, seed);
    if (kind > 1) throw FormatError("unknown rotation kind");
    return {static_cast<IndexAlgo>(tag), static_cast<int>(d), static_cast<int>(D),
            static_cast<int>(n), static_cast<RotationKind>(kind), seed};
}

}  // namespace

const char* algo_name(IndexAlgo algo) {
    switch (algo) {
        case IndexAlgo::one_ceos: return "1ceos";
        case IndexAlgo::sceos_full: return "sceos";
        case IndexAlgo::sceos_ta: return "sceos-ta";
        case IndexAlgo::coceos: return "coceos";
    }
    return "?";
}

void save_index(std::ostream& out, const OneCeosIndex& index, const RotationSpec& rot) {
    write_header(out, IndexAlgo::one_ceos, rot.d, index.D, index.n, rot);
    write_pod(out, static_cast<uint64_t>(index.b));
    write_pod(out, static_cast<uint64_t>(index.list_len));
    write_pod(out, static_cast<uint8_t>(index.two_sided ? 1 : 0));
    write_array(out, index.max_lists.data(), index.max_lists.size());
    if (index.two_sided) write_array(out, index.min_lists.data(), index.min_lists.size());
}

void save_index(std::ostream& out, const SceosFullIndex& index, const RotationSpec& rot) {
    write_header(out, IndexAlgo::sceos_full, rot.d, index.D, index.n, rot);
    write_pod(out, static_cast<uint64_t>(index.s0));
    write_pod(out, static_cast<uint64_t>(index.b));
    write_pod(out, static_cast<uint64_t>(index.lists.size()));
    for (const auto& [key, list] : index.lists) {
        write_array(out, key.data(), key.size());  // 2*s0 dims
        write_pod(out, static_cast<uint64_t>(list.size()));
        write_array(out, list.data(), list.size());
    }
}

void save_index(std::ostream& out, const SceosTaIndex& index, const RotationSpec& rot) {
    write_header(out, IndexAlgo::sceos_ta, rot.d, index.D, index.n, rot);
    write_array(out, index.sorted_ids.data(), index.sorted_ids.size());
    write_array(out, index.sorted_values.data(), index.sorted_values.size());
    write_array(out, index.projected.values.data(),
                static_cast<size_t>(index.D) * static_cast<size_t>(index.n));
}

void save_index(std::ostream& out, const CoCeosIndex& index, const RotationSpec& rot) {
    write_header(out, IndexAlgo::coceos, rot.d, index.D, index.n, rot);
    write_pod(out, static_cast<uint64_t>(index.m));
    write_pod(out, static_cast<uint64_t>(index.list_len));
    write_array(out, index.max_ids.data(), index.max_ids.size());
    write_array(out, index.max_values.data(), index.max_values.size());
    write_array(out, index.min_ids.data(), index.min_ids.size());
    write_array(out, index.min_values.data(), index.min_values.size());
}

void save_index_file(const std::string& path, const LoadedIndex& li) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    std::visit([&](const auto& index) { save_index(out, index, li.rotation); }, li.index);
    if (!out) throw FormatError("write failed: " + path);
}

LoadedIndex load_index(std::istream& in) {
    const Header h = read_header(in);
    LoadedIndex li;
    li.algo = h.algo;
    li.d = h.d;
    li.rotation = make_rotation(h.kind, h.seed, h.d, h.D);
    if (li.rotation.D != h.D)
        throw FormatError("rotation dimension mismatch in index header");

    switch (h.algo) {
        case IndexAlgo::one_ceos: {
            OneCeosIndex index;
            index.D = h.D;
            index.n = h.n;
            uint64_t b = 0, list_len = 0;
            uint8_t two_sided = 0;
            read_pod(in, b);
            read_pod(in, list_len);
            read_pod(in, two_sided);
            index.b = static_cast<int>(b);
            index.list_len = static_cast<int>(list_len);
            index.two_sided = two_sided != 0;
            index.max_lists.resize(static_cast<size_t>(index.D) * index.list_len);
            read_array(in, index.max_lists.data(), index.max_lists.size());
            if (index.two_sided) {
                index.min_lists.resize(index.max_lists.size());
                read_array(in, index.min_lists.data(), index.min_lists.size());
            }
            li.index = std::move(index);
            break;
        }
        case IndexAlgo::sceos_full: {
            SceosFullIndex index;
            index.D = h.D;
            index.n = h.n;
            uint64_t s0 = 0, b = 0, n_lists = 0;
            read_pod(in, s0);
            read_pod(in, b);
            read_pod(in, n_lists);
            index.s0 = static_cast<int>(s0);
            index.b = static_cast<int>(b);
            for (uint64_t i = 0; i < n_lists; ++i) {
                std::vector<int32_t> key(static_cast<size_t>(2 * index.s0));
                read_array(in, key.data(), key.size());
                uint64_t len = 0;
                read_pod(in, len);
                std::vector<int32_t> list(static_cast<size_t>(len));
                read_array(in, list.data(), list.size());
                index.lists.emplace(std::move(key), std::move(list));
            }
            li.index = std::move(index);
            break;
        }
        case IndexAlgo::sceos_ta: {
            SceosTaIndex index;
            index.D = h.D;
            index.n = h.n;
            const size_t total = static_cast<size_t>(h.D) * static_cast<size_t>(h.n);
            index.sorted_ids.resize(total);
            index.sorted_values.resize(total);
            read_array(in, index.sorted_ids.data(), total);
            read_array(in, index.sorted_values.data(), total);
            index.projected.D = h.D;
            index.projected.n = h.n;
            index.projected.rotation = li.rotation;
            index.projected.values.resize(h.D, h.n);
            read_array(in, index.projected.values.data(), total);
            li.index = std::move(index);
            break;
        }
        case IndexAlgo::coceos: {
            CoCeosIndex index;
            index.D = h.D;
            index.n = h.n;
            uint64_t m = 0, list_len = 0;
            read_pod(in, m);
            read_pod(in, list_len);
            index.m = static_cast<int>(m);
            index.list_len = static_cast<int>(list_len);
            const size_t total = static_cast<size_t>(index.D) * index.list_len;
            index.max_ids.resize(total);
            index.max_values.resize(total);
            index.min_ids.resize(total);
            index.min_values.resize(total);
            read_array(in, index.max_ids.data(), total);
            read_array(in, index.max_values.data(), total);
            read_array(in, index.min_ids.data(), total);
            read_array(in, index.min_values.data(), total);
            li.index = std::move(index);
            break;
        }
    }
    return li;
}

LoadedIndex load_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open index file: " + path);
    return load_index(in);
}

}  // namespace ceos
