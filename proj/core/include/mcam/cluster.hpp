#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcam/affinity.hpp"
#include "mcam/tensor.hpp"

namespace mcam {

/// Partition of one mode's slice indices. `exemplars` is filled by affinity
/// propagation only; `converged` is false when AP hit its iteration budget.
struct ModeClustering {
    int mode = 0;
    std::vector<int> labels;
    int cluster_count = 0;
    std::vector<int> exemplars;
    bool converged = true;
};

/// Affinity propagation controls (Frey-Dueck conventions). A preference of
/// nullopt means the median of the off-diagonal similarities.
struct APParams {
    double damping = 0.5;
    int max_iterations = 200;
    int convergence_window = 15;
    std::optional<double> preference;
};

struct KMeansResult {
    std::vector<int> labels;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // winning restart, per iteration
};

/// Lloyd's algorithm with k-means++ seeding, 10 restarts, 300 iterations max
/// and relative inertia tolerance 1e-6. Points are the rows of `points`.
/// Deterministic for a fixed seed; the best restart by inertia wins.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed);

/// Normalized spectral clustering: symmetric normalized Laplacian, embedding
/// from the k smallest eigenvalues, row normalization, then k-means.
/// Zero-degree rows become singleton clusters appended after the k-means ids.
ModeClustering spectral_clustering(const AffinityMatrix& a, int k,
                                   std::uint64_t seed);

/// Dense affinity propagation on s(i,j) = C'_ij with damped responsibility /
/// availability updates. The cluster count is discovered, not an input.
/// Non-convergence is reported through `converged`, never as an error.
/// Exact ties (perfectly symmetric inputs) are broken by an infinitesimal
/// hash-derived jitter on the similarities, so results stay reproducible.
ModeClustering affinity_propagation(const AffinityMatrix& a,
                                    const APParams& params = {});

}  // namespace mcam
