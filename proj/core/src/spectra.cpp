#include "mcam/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "mcam/error.hpp"
#include "mcam/parallel.hpp"

namespace mcam {

Matrix slice_covariance(const Tensor3& t, int mode, std::size_t index) {
    const Matrix s = slice(t, mode, index);
    Matrix cov(s.cols(), s.cols());
    cov.noalias() = s.transpose() * s;
    return cov;
}

std::pair<Vector, Matrix> top_eigenpairs(const Matrix& c, int count) {
    if (c.rows() != c.cols()) {
        throw Error(ErrorKind::Contract, "matrix is not square");
    }
    if (count < 1 || count > c.rows()) {
        throw Error(ErrorKind::Contract,
                    "eigenpair count " + std::to_string(count) +
                        " out of range for size " + std::to_string(c.rows()));
    }
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale) {
        throw Error(ErrorKind::Contract,
                    "matrix is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Numeric,
                    "symmetric eigensolver failed to converge within its "
                    "iteration budget (30 sweeps per off-diagonal element)");
    }

    // Eigen returns ascending order; take the top `count` reversed.
    const auto n = c.rows();
    Vector values(count);
    Matrix vectors(n, count);
    for (int k = 0; k < count; ++k) {
        const auto src = n - 1 - k;
        values(k) = solver.eigenvalues()(src);
        vectors.col(k) = solver.eigenvectors().col(src);

        // Canonical sign: the entry of largest magnitude is positive.
        Eigen::Index arg = 0;
        vectors.col(k).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, k) < 0.0) vectors.col(k) = -vectors.col(k);
    }
    return {std::move(values), std::move(vectors)};
}

int select_components(const Vector& descending_eigenvalues) {
    const int p = static_cast<int>(descending_eigenvalues.size());
    if (p == 0) {
        throw Error(ErrorKind::Contract, "empty eigenvalue list");
    }
    const int window = std::min(kMaxScreeComponents, p);
    int best = 1;
    double best_gap = 0.0;
    for (int j = 1; j < window; ++j) {
        const double gap =
            descending_eigenvalues(j - 1) - descending_eigenvalues(j);
        if (gap > best_gap) {
            best_gap = gap;
            best = j;
        }
    }
    return best;
}

ModeSpectra compute_mode_spectra(const Tensor3& t, int mode,
                                 int eigenpair_count, int workers) {
    const std::size_t slice_count = t.dim(mode);
    const std::size_t cov_size = (mode == 3) ? t.dim(2) : t.dim(3);
    const int p = eigenpair_count > 0
                      ? eigenpair_count
                      : static_cast<int>(std::min<std::size_t>(
                            kMaxScreeComponents, cov_size));
    if (p > static_cast<int>(cov_size)) {
        throw Error(ErrorKind::Contract,
                    "eigenpair count exceeds covariance size");
    }

    ModeSpectra spectra;
    spectra.mode = mode;
    spectra.slices.resize(slice_count);

    parallel_for(
        slice_count,
        [&](std::size_t i) {
            const Matrix cov = slice_covariance(t, mode, i);
            auto [values, vectors] = top_eigenpairs(cov, p);

            // Covariances are PSD; clamp rounding noise below zero.
            const double eps = 1e-9 * std::max(std::abs(values(0)),
                                               std::abs(values(p - 1)));
            for (int k = 0; k < p; ++k) {
                if (values(k) < 0.0) {
                    if (values(k) < -eps) {
                        throw Error(ErrorKind::Numeric,
                                    "covariance eigenvalue " +
                                        std::to_string(values(k)) +
                                        " is negative beyond tolerance");
                    }
                    values(k) = 0.0;
                }
            }

            SliceSpectrum& s = spectra.slices[i];
            s.selected_count = select_components(values);
            s.eigenvalues = std::move(values);
            s.eigenvectors = std::move(vectors);
        },
        workers);

    Vector lambda = Vector::Zero(p);
    for (const SliceSpectrum& s : spectra.slices) {
        for (int k = 0; k < p; ++k) lambda(k) = std::max(lambda(k), s.eigenvalues(k));
    }
    spectra.lambda_per_component = std::move(lambda);
    return spectra;
}

int effective_dimension(const ModeSpectra& spectra) {
    if (spectra.slices.empty()) {
        throw Error(ErrorKind::Contract, "mode spectra holds no slices");
    }
    int r = 1;
    for (const SliceSpectrum& s : spectra.slices) r = std::max(r, s.selected_count);
    return r;
}

}  // namespace mcam
