#pragma once

#include "ceos/indexes.hpp"

#include <iosfwd>
#include <variant>

namespace ceos {

// Little-endian binary container:
//   magic "CEOSIDX\0" | u32 version | u32 algo tag | u64 d, D, n
//   | u8 rotation kind | u64 rotation seed | per-algorithm payload.
// The rotation is regenerated from (kind, seed, d, D) on load, which is
// bit-exact by the determinism contract of make_rotation.
inline constexpr uint32_t kIndexFormatVersion = 1;

enum class IndexAlgo : uint32_t { one_ceos = 1, sceos_full = 2, sceos_ta = 3, coceos = 4 };

struct LoadedIndex {
    IndexAlgo algo;
    int d = 0;
    RotationSpec rotation;
    std::variant<OneCeosIndex, SceosFullIndex, SceosTaIndex, CoCeosIndex> index;
};

void save_index(std::ostream& out, const OneCeosIndex& index, const RotationSpec& rot);
void save_index(std::ostream& out, const SceosFullIndex& index, const RotationSpec& rot);
void save_index(std::ostream& out, const SceosTaIndex& index, const RotationSpec& rot);
void save_index(std::ostream& out, const CoCeosIndex& index, const RotationSpec& rot);

void save_index_file(const std::string& path, const LoadedIndex& li);

LoadedIndex load_index(std::istream& in);
LoadedIndex load_index_file(const std::string& path);

const char* algo_name(IndexAlgo algo);

}  // namespace ceos
