#pragma once

#include <filesystem>

#include "mcam/tensor.hpp"

namespace mcam {

/// Binary tensor format "T3B1": 4-byte ASCII magic `T3B1`, three little-endian
/// u64 dims, then m1*m2*m3 little-endian IEEE-754 doubles in flat (mode-1
/// major) order. save followed by load is the identity, bit for bit.
void save_tensor(const Tensor3& t, const std::filesystem::path& path);
Tensor3 load_tensor(const std::filesystem::path& path);

/// Text loader: one header line `m1,m2,m3`, then lines `i1,i2,i3,value` with
/// 0-based indices. Cells not listed are zero; later duplicates overwrite.
Tensor3 load_tensor_csv(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" uses the text loader, anything else T3B1.
Tensor3 load_tensor_any(const std::filesystem::path& path);

}  // namespace mcam
