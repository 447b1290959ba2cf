#pragma once

// Binary checkpoint layout (all integers and floats little-endian):
//
//   char[8]   magic "VRKGCKPT"
//   u64       format version (1)
//   u64 x 7   M, |E|, |R|, d, K, Q, L
//   f64[...]  user_emb (M x d), entity_emb (|E| x d), relation_feat (|R| x d),
//             centroids (K x d), fusion_logits (K), each row-major
//   i32[|R|]  relation -> virtual relation assignment
//
// Layer dumps reuse the same encoding for a sequence of matrices:
//
//   char[8] "VRKGDUMP", u64 version, u64 count, then per matrix: u64 rows,
//   u64 cols, f64[rows * cols].

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vrkg/params.hpp"

namespace vrkg {

struct Checkpoint {
    ParameterSet params;
    std::vector<std::int32_t> assignment;
    std::uint64_t iterations = 0;  // Q
    std::uint64_t layers = 0;      // L
};

inline constexpr std::uint64_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws Error(Data) on bad magic, unknown version, truncation or trailing bytes.
Checkpoint load_checkpoint(const std::filesystem::path& path);

void save_matrices(const std::filesystem::path& path, const std::vector<Matrix>& matrices);
std::vector<Matrix> load_matrices(const std::filesystem::path& path);

}  // namespace vrkg
