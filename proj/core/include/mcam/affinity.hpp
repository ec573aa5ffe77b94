#pragma once

#include <cstddef>
#include <filesystem>

#include "mcam/spectra.hpp"
#include "mcam/tensor.hpp"

namespace mcam {

/// Per-mode slice similarity matrix C'. Symmetric with entries in [0, 1].
struct AffinityMatrix {
    int mode = 0;
    Matrix values;

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(values.rows());
    }
};

/// Component similarity matrix C_kk' with
///   (C_kk')_ij = (lambda_k^(i) * lambda_k'^(j) / lambda^2) * |<w_k^(i), w_k'^(j)>|
/// where lambda is the largest first eigenvalue across slices. k and k_prime
/// are 1-based. Not symmetric unless k == k_prime.
Matrix component_matrix(const ModeSpectra& spectra, int k, int k_prime);

/// Variant I: C' = lambda^2 / (sum_k lambda_k)^2 * sum_{k,k'<=r} C_kk'.
/// Includes the cross eigen-subspace terms.
AffinityMatrix affinity_mcam1(const ModeSpectra& spectra, int r);

/// Variant II: C' = lambda^2 / (sum_k lambda_k^2) * sum_{k<=r} C_kk.
/// Diagonal terms only.
AffinityMatrix affinity_mcam2(const ModeSpectra& spectra, int r);

/// CSV export: a `mode,m` header line, the values of those two fields, then
/// m rows of m comma-separated entries (row-major).
void save_affinity_csv(const AffinityMatrix& a, const std::filesystem::path& path);

}  // namespace mcam
