#include "mcam/affinity.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "mcam/error.hpp"
#include "mcam/parallel.hpp"

namespace mcam {

namespace {

// Shared term kernel. Both affinity variants and component_matrix evaluate
// (i,j,k,k') terms through this one function with a fixed operation order, so
// the r = 1 reduction of either variant reproduces C_11 bit for bit.
inline double component_entry(const ModeSpectra& sp, std::size_t i,
                              std::size_t j, int k, int kp, double lambda_sq) {
    const SliceSpectrum& si = sp.slices[i];
    const SliceSpectrum& sj = sp.slices[j];
    const double num = si.eigenvalues(k) * sj.eigenvalues(kp);
    const double dot =
        std::abs(si.eigenvectors.col(k).dot(sj.eigenvectors.col(kp)));
    return (num / lambda_sq) * dot;
}

double checked_lambda(const ModeSpectra& spectra) {
    if (spectra.slices.empty() || spectra.component_count() == 0) {
        throw Error(ErrorKind::Contract, "mode spectra is empty");
    }
    const double lambda = spectra.lambda_per_component(0);
    if (!(lambda > 0.0)) {
        throw Error(ErrorKind::Degenerate,
                    "largest slice eigenvalue is zero; the tensor carries no "
                    "signal to compare");
    }
    return lambda;
}

void check_rank(const ModeSpectra& spectra, int r) {
    if (r < 1 || r > spectra.component_count()) {
        throw Error(ErrorKind::Contract,
                    "r = " + std::to_string(r) +
                        " outside [1, " +
                        std::to_string(spectra.component_count()) + "]");
    }
}

enum class Variant { WithCrossTerms, DiagonalOnly };

AffinityMatrix build(const ModeSpectra& spectra, int r, Variant variant) {
    check_rank(spectra, r);
    const double lambda = checked_lambda(spectra);
    const double lambda_sq = lambda * lambda;

    double denom = 0.0;
    if (variant == Variant::WithCrossTerms) {
        double sum = 0.0;
        for (int k = 0; k < r; ++k) sum += spectra.lambda_per_component(k);
        denom = sum * sum;
    } else {
        for (int k = 0; k < r; ++k) {
            const double lk = spectra.lambda_per_component(k);
            denom += lk * lk;
        }
    }
    const double prefactor = lambda_sq / denom;

    const std::size_t m = spectra.slices.size();
    AffinityMatrix a;
    a.mode = spectra.mode;
    a.values.resize(m, m);

    // Each unordered pair is computed exactly once and mirrored, so the
    // result is symmetric by construction. Rows are independent.
    parallel_for(m, [&](std::size_t i) {
        for (std::size_t j = i; j < m; ++j) {
            double acc = 0.0;
            if (variant == Variant::WithCrossTerms) {
                for (int k = 0; k < r; ++k)
                    for (int kp = 0; kp < r; ++kp)
                        acc += component_entry(spectra, i, j, k, kp, lambda_sq);
            } else {
                for (int k = 0; k < r; ++k)
                    acc += component_entry(spectra, i, j, k, k, lambda_sq);
            }
            const double value = prefactor * acc;
            a.values(i, j) = value;
            a.values(j, i) = value;
        }
    });

    const double max_entry = a.values.maxCoeff();
    const double min_entry = a.values.minCoeff();
    if (min_entry < 0.0 || max_entry > 1.0 + 1e-9) {
        throw Error(ErrorKind::Numeric,
                    "affinity entry outside [0, 1]: min " +
                        std::to_string(min_entry) + ", max " +
                        std::to_string(max_entry));
    }
    return a;
}

}  // namespace

Matrix component_matrix(const ModeSpectra& spectra, int k, int k_prime) {
    const double lambda = checked_lambda(spectra);
    const int p = spectra.component_count();
    if (k < 1 || k > p || k_prime < 1 || k_prime > p) {
        throw Error(ErrorKind::Contract,
                    "component indices (" + std::to_string(k) + ", " +
                        std::to_string(k_prime) + ") outside [1, " +
                        std::to_string(p) + "]");
    }
    const double lambda_sq = lambda * lambda;
    const std::size_t m = spectra.slices.size();
    Matrix c(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            c(i, j) = component_entry(spectra, i, j, k - 1, k_prime - 1, lambda_sq);
    return c;
}

AffinityMatrix affinity_mcam1(const ModeSpectra& spectra, int r) {
    return build(spectra, r, Variant::WithCrossTerms);
}

AffinityMatrix affinity_mcam2(const ModeSpectra& spectra, int r) {
    return build(spectra, r, Variant::DiagonalOnly);
}

void save_affinity_csv(const AffinityMatrix& a, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Format, "cannot open " + path.string() + " for writing");
    }
    const auto m = a.values.rows();
    out << "mode,m\n" << a.mode << ',' << m << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", a.values(i, j));
            out << buf << (j + 1 < m ? ',' : '\n');
        }
    }
    if (!out) {
        throw Error(ErrorKind::Format, "write failed for " + path.string());
    }
}

}  // namespace mcam
