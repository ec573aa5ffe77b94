#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mcam/tensor.hpp"

namespace mcam {

/// Block-structured synthetic tensor: component j places weight gamma[j] on
/// the cartesian product of its per-mode index sets, via indicator factor
/// columns scaled to unit norm. Index sets must be disjoint within a mode and
/// need not cover all indices.
struct SyntheticSpec {
    std::array<std::size_t, 3> dims;
    // clusters[mode][j] holds the indices of component j in that mode.
    std::array<std::vector<std::vector<std::size_t>>, 3> clusters;
    std::vector<double> gamma;  // one weight per component
    bool noise = true;          // add i.i.d. standard normal noise
    std::uint64_t seed = 0;
};

/// Per-mode ground-truth labels. Indices outside every index set receive
/// `background_label` (== component count).
struct GroundTruth {
    std::array<std::vector<int>, 3> labels;
    int background_label = 0;
};

/// Cubic layout used throughout the synthetic experiments: `count` blocks of
/// `block_size` consecutive indices in each mode, equal weight gamma.
SyntheticSpec uniform_block_spec(std::size_t dim, int count,
                                 std::size_t block_size, double gamma,
                                 bool noise = true, std::uint64_t seed = 0);

std::pair<Tensor3, GroundTruth> generate(const SyntheticSpec& spec);

/// JSON document form of SyntheticSpec:
/// {"dims":[...], "clusters":[[[...],...],[...],[...]],
///  "gamma": 55.0 | [..], "noise": true, "seed": 0}
SyntheticSpec parse_spec_json(const std::string& text);
SyntheticSpec load_spec_json(const std::filesystem::path& path);

/// Ground truth CSV: header `mode,index,label`, one row per (mode, index).
void save_ground_truth_csv(const GroundTruth& truth,
                           const std::filesystem::path& path);
GroundTruth load_ground_truth_csv(const std::filesystem::path& path);

}  // namespace mcam
