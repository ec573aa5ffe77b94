#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mcam/tensor.hpp"

namespace mcam {

/// Rank-d CP model: t ~ sum_j weights[j] * a_j (x) b_j (x) c_j with unit-norm
/// factor columns and non-negative weights.
struct CPModel {
    Vector weights;
    std::array<Matrix, 3> factors;
    double fit = 0.0;  // 1 - |t - reconstruction|_F / |t|_F
    int iterations = 0;
    std::vector<double> fit_history;
};

/// Tucker model: core tensor contracted with per-mode orthonormal factors.
struct TuckerModel {
    Tensor3 core;
    std::array<Matrix, 3> factors;
    int iterations = 0;
    std::vector<double> core_norm_history;
};

/// Alternating least squares for the CP decomposition. Random seeded init,
/// ridge-regularized normal equations (1e-12), stop on fit change < 1e-8.
CPModel cp_als(const Tensor3& t, int rank, int max_iterations = 100,
               std::uint64_t seed = 0);

/// Higher-order orthogonal iteration with HOSVD initialization. The init is
/// deterministic; seed is accepted for interface symmetry with cp_als.
TuckerModel hooi(const Tensor3& t, const std::array<int, 3>& ranks,
                 int max_iterations = 50, std::uint64_t seed = 0);

Tensor3 reconstruct(const CPModel& model, const std::array<std::size_t, 3>& dims);
Tensor3 reconstruct(const TuckerModel& model);

/// k-means over the rows of the mode's factor matrix.
std::vector<int> factor_clustering(const CPModel& model, int mode, int k,
                                   std::uint64_t seed);
std::vector<int> factor_clustering(const TuckerModel& model, int mode, int k,
                                   std::uint64_t seed);

}  // namespace mcam
