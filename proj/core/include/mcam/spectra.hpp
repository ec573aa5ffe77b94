#pragma once

#include <cstddef>
#include <vector>

#include "mcam/tensor.hpp"

namespace mcam {

/// Scree selection never looks past this many leading eigenvalues, and the
/// default number of computed eigenpairs per slice is capped here as well.
inline constexpr int kMaxScreeComponents = 10;

/// Eigen-decomposition summary of one slice covariance.
struct SliceSpectrum {
    Vector eigenvalues;   // descending, non-negative (tiny negatives clamped)
    Matrix eigenvectors;  // one orthonormal column per eigenvalue
    int selected_count = 0;  // n_i chosen by the scree rule
};

/// All slice spectra of one mode plus the per-component maxima
/// lambda_k = max_i lambda_k^(i).
struct ModeSpectra {
    int mode = 0;
    std::vector<SliceSpectrum> slices;
    Vector lambda_per_component;

    [[nodiscard]] int component_count() const {
        return static_cast<int>(lambda_per_component.size());
    }
};

/// Covariance S^T S of slice(t, mode, index); m3 x m3 for modes 1 and 2,
/// m2 x m2 for mode 3.
Matrix slice_covariance(const Tensor3& t, int mode, std::size_t index);

/// The `count` largest eigenvalues (descending) of a symmetric matrix with
/// orthonormal eigenvectors. Vectors carry a canonical sign: the entry of
/// largest magnitude is positive. Input must be symmetric to 1e-9 relative.
std::pair<Vector, Matrix> top_eigenpairs(const Matrix& c, int count);

/// Scree rule: position of the largest successive gap within the first
/// min(10, p) eigenvalues; 1 if the list has length one or all gaps vanish.
int select_components(const Vector& descending_eigenvalues);

/// Spectra of every slice of one mode. eigenpair_count 0 means the default
/// min(10, covariance size). Slices are processed in parallel; assembly is
/// order-independent.
ModeSpectra compute_mode_spectra(const Tensor3& t, int mode,
                                 int eigenpair_count = 0, int workers = 0);

/// Effective clustering dimension r = max over slices of selected_count.
int effective_dimension(const ModeSpectra& spectra);

}  // namespace mcam
