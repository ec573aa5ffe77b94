#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mcam/cluster.hpp"
#include "mcam/tensor.hpp"

namespace mcam {

/// One partition per mode; the cartesian products of the per-mode clusters
/// are the tensor blocks.
struct MultiwayClustering {
    std::array<std::vector<int>, 3> labels;
};

/// Adjusted Rand index in [-1, 1]; symmetric, invariant under relabeling.
double ari(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

/// Normalized mutual information in [0, 1], normalized by the arithmetic mean
/// of the entropies. Defined as 0 when both partitions are single clusters.
double nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

struct SilhouetteSelection {
    int best_k = 0;
    std::vector<std::pair<int, double>> scores;  // (k, mean silhouette)
};

/// Runs spectral clustering for each k in [k_min, k_max] and scores it with
/// the mean silhouette under the dissimilarity d(i,j) = 1 - C'_ij. Singleton
/// points contribute a silhouette of 0. Ties go to the smallest k.
SilhouetteSelection silhouette_select_k(const AffinityMatrix& a, int k_min,
                                        int k_max, std::uint64_t seed = 0);

/// Per-block means of the tensor under a multiway clustering.
struct BlockModel {
    std::array<int, 3> cluster_counts;
    std::vector<double> means;        // K1*K2*K3, block (b1,b2,b3) at (b1*K2+b2)*K3+b3
    std::vector<std::size_t> counts;  // cell count per block, same layout
};

BlockModel build_block_model(const Tensor3& t, const MultiwayClustering& mc);

struct BlockRmseResult {
    double mean = 0.0;                // unweighted mean over non-empty blocks
    std::vector<double> per_block;    // non-empty blocks in block-id order
    std::vector<std::array<int, 3>> block_ids;  // aligned with per_block
};

/// Root-mean-square deviation of cells from their block mean, per block and
/// averaged (unweighted) over the non-empty blocks.
BlockRmseResult block_rmse(const Tensor3& t, const MultiwayClustering& mc);

}  // namespace mcam
