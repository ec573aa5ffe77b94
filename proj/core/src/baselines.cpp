#include "mcam/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcam/cluster.hpp"
#include "mcam/error.hpp"
#include "mcam/rng.hpp"
#include "mcam/spectra.hpp"

namespace mcam {

namespace {

constexpr double kRidge = 1e-12;
constexpr double kFitTolerance = 1e-8;

// Khatri-Rao product where the second argument's rows vary fastest, matching
// the unfolding column order of tensor.cpp.
Matrix khatri_rao(const Matrix& p, const Matrix& q) {
    Matrix out(p.rows() * q.rows(), p.cols());
    for (Eigen::Index c = 0; c < p.cols(); ++c)
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            out.col(c).segment(i * q.rows(), q.rows()) = p(i, c) * q.col(c);
    return out;
}

// Inverse of unfold: fills a tensor from its mode-n unfolding.
Tensor3 fold(const Matrix& u, int mode, const std::array<std::size_t, 3>& dims) {
    const auto [m1, m2, m3] = dims;
    std::vector<double> values(m1 * m2 * m3);
    for (std::size_t i1 = 0; i1 < m1; ++i1) {
        for (std::size_t i2 = 0; i2 < m2; ++i2) {
            for (std::size_t i3 = 0; i3 < m3; ++i3) {
                double v;
                if (mode == 1) v = u(i1, i3 * m2 + i2);
                else if (mode == 2) v = u(i2, i3 * m1 + i1);
                else v = u(i3, i2 * m1 + i1);
                values[(i1 * m2 + i2) * m3 + i3] = v;
            }
        }
    }
    return Tensor3(m1, m2, m3, std::move(values));
}

// Mode-n product with a matrix: contracts dim(mode) down to m.rows().
Tensor3 mode_product(const Tensor3& t, int mode, const Matrix& m) {
    const Matrix projected = m * unfold(t, mode);
    auto dims = t.dims();
    dims[mode - 1] = static_cast<std::size_t>(m.rows());
    return fold(projected, mode, dims);
}

void normalize_columns_keeping_old(Matrix& updated, const Matrix& previous,
                                   Vector& norms) {
    for (Eigen::Index c = 0; c < updated.cols(); ++c) {
        const double norm = updated.col(c).norm();
        norms(c) = norm;
        if (norm > 0.0) {
            updated.col(c) /= norm;
        } else {
            updated.col(c) = previous.col(c);  // keep a unit column, weight 0
        }
    }
}

}  // namespace

CPModel cp_als(const Tensor3& t, int rank, int max_iterations,
               std::uint64_t seed) {
    const auto [m1, m2, m3] = t.dims();
    const std::size_t min_dim = std::min({m1, m2, m3});
    if (rank < 1 || static_cast<std::size_t>(rank) > min_dim) {
        throw Error(ErrorKind::Contract,
                    "cp rank " + std::to_string(rank) + " outside [1, " +
                        std::to_string(min_dim) + "]");
    }
    if (max_iterations < 1) {
        throw Error(ErrorKind::Contract, "max_iterations must be positive");
    }

    CPModel model;
    Rng rng(derive_seed(seed, 0x637020616c73ULL));
    const std::array<std::size_t, 3> dims = {m1, m2, m3};
    for (int mode = 0; mode < 3; ++mode) {
        Matrix f(dims[mode], rank);
        for (Eigen::Index i = 0; i < f.rows(); ++i)
            for (Eigen::Index c = 0; c < f.cols(); ++c) f(i, c) = rng.normal();
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            const double norm = f.col(c).norm();
            if (norm > 0.0) f.col(c) /= norm;
            else f(0, c) = 1.0;
        }
        model.factors[mode] = std::move(f);
    }
    model.weights = Vector::Zero(rank);

    const double t_norm = t.frobenius_norm();
    if (t_norm == 0.0) {
        model.fit = 1.0;  // zero tensor is represented exactly by zero weights
        model.fit_history.push_back(1.0);
        return model;
    }

    const Matrix u1 = unfold(t, 1);
    const Matrix u2 = unfold(t, 2);
    const Matrix u3 = unfold(t, 3);
    const Matrix ridge = kRidge * Matrix::Identity(rank, rank);

    Matrix& a = model.factors[0];
    Matrix& b = model.factors[1];
    Matrix& c = model.factors[2];
    Vector lambda = Vector::Ones(rank);
    double previous_fit = -std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= max_iterations; ++iter) {
        // Mode 1.
        {
            const Matrix gram = (b.transpose() * b).cwiseProduct(c.transpose() * c);
            const Matrix mttkrp = u1 * khatri_rao(c, b);
            const Matrix old = a;
            a = (gram + ridge).ldlt().solve(mttkrp.transpose()).transpose();
            normalize_columns_keeping_old(a, old, lambda);
        }
        // Mode 2.
        {
            const Matrix gram = (a.transpose() * a).cwiseProduct(c.transpose() * c);
            const Matrix mttkrp = u2 * khatri_rao(c, a);
            const Matrix old = b;
            b = (gram + ridge).ldlt().solve(mttkrp.transpose()).transpose();
            normalize_columns_keeping_old(b, old, lambda);
        }
        // Mode 3 keeps its MTTKRP for the fit shortcut below.
        Matrix mttkrp3;
        {
            const Matrix gram = (a.transpose() * a).cwiseProduct(b.transpose() * b);
            mttkrp3 = u3 * khatri_rao(b, a);
            const Matrix old = c;
            c = (gram + ridge).ldlt().solve(mttkrp3.transpose()).transpose();
            normalize_columns_keeping_old(c, old, lambda);
        }

        // |t - rec|^2 = |t|^2 - 2<t,rec> + |rec|^2 via factor Grams.
        double inner = 0.0;
        for (int j = 0; j < rank; ++j) inner += lambda(j) * c.col(j).dot(mttkrp3.col(j));
        const Matrix gram_all = (a.transpose() * a)
                                    .cwiseProduct(b.transpose() * b)
                                    .cwiseProduct(c.transpose() * c);
        const double rec_sq = lambda.dot(gram_all * lambda);
        const double residual_sq =
            std::max(0.0, t_norm * t_norm - 2.0 * inner + rec_sq);
        const double fit = 1.0 - std::sqrt(residual_sq) / t_norm;

        model.fit = fit;
        model.iterations = iter;
        model.fit_history.push_back(fit);
        if (std::abs(fit - previous_fit) < kFitTolerance) break;
        previous_fit = fit;
    }

    model.weights = lambda;
    return model;
}

TuckerModel hooi(const Tensor3& t, const std::array<int, 3>& ranks,
                 int max_iterations, std::uint64_t seed) {
    (void)seed;  // HOSVD initialization is deterministic
    const auto dims = t.dims();
    for (int mode = 0; mode < 3; ++mode) {
        if (ranks[mode] < 1 ||
            static_cast<std::size_t>(ranks[mode]) > dims[mode]) {
            throw Error(ErrorKind::Contract,
                        "tucker rank " + std::to_string(ranks[mode]) +
                            " outside [1, " + std::to_string(dims[mode]) +
                            "] for mode " + std::to_string(mode + 1));
        }
    }
    if (max_iterations < 1) {
        throw Error(ErrorKind::Contract, "max_iterations must be positive");
    }

    std::array<Matrix, 3> factors;
    for (int mode = 1; mode <= 3; ++mode) {
        const Matrix u = unfold(t, mode);
        Matrix gram(u.rows(), u.rows());
        gram.noalias() = u * u.transpose();
        factors[mode - 1] = top_eigenpairs(gram, ranks[mode - 1]).second;
    }

    auto project_core = [&] {
        Tensor3 core = mode_product(t, 1, factors[0].transpose());
        core = mode_product(core, 2, factors[1].transpose());
        return mode_product(core, 3, factors[2].transpose());
    };

    TuckerModel model{project_core(), factors, 0, {}};
    double previous_norm = model.core.frobenius_norm();
    model.core_norm_history.push_back(previous_norm);

    for (int iter = 1; iter <= max_iterations; ++iter) {
        for (int mode = 1; mode <= 3; ++mode) {
            Tensor3 projected = t;
            for (int other = 1; other <= 3; ++other) {
                if (other == mode) continue;
                projected = mode_product(projected, other,
                                         factors[other - 1].transpose());
            }
            const Matrix u = unfold(projected, mode);
            Matrix gram(u.rows(), u.rows());
            gram.noalias() = u * u.transpose();
            factors[mode - 1] = top_eigenpairs(gram, ranks[mode - 1]).second;
        }

        model.factors = factors;
        model.core = project_core();
        model.iterations = iter;
        const double norm = model.core.frobenius_norm();
        model.core_norm_history.push_back(norm);
        if (std::abs(norm - previous_norm) <= 1e-9 * std::max(1.0, norm)) break;
        previous_norm = norm;
    }
    return model;
}

Tensor3 reconstruct(const CPModel& model, const std::array<std::size_t, 3>& dims) {
    const auto [m1, m2, m3] = dims;
    const int rank = static_cast<int>(model.weights.size());
    std::vector<double> values(m1 * m2 * m3, 0.0);
    for (int j = 0; j < rank; ++j) {
        const double w = model.weights(j);
        if (w == 0.0) continue;
        for (std::size_t i1 = 0; i1 < m1; ++i1) {
            const double aj = w * model.factors[0](i1, j);
            for (std::size_t i2 = 0; i2 < m2; ++i2) {
                const double ab = aj * model.factors[1](i2, j);
                double* row = values.data() + (i1 * m2 + i2) * m3;
                for (std::size_t i3 = 0; i3 < m3; ++i3) {
                    row[i3] += ab * model.factors[2](i3, j);
                }
            }
        }
    }
    return Tensor3(m1, m2, m3, std::move(values));
}

Tensor3 reconstruct(const TuckerModel& model) {
    Tensor3 out = mode_product(model.core, 1, model.factors[0]);
    out = mode_product(out, 2, model.factors[1]);
    return mode_product(out, 3, model.factors[2]);
}

namespace {

const Matrix& checked_factor(const std::array<Matrix, 3>& factors, int mode) {
    if (mode < 1 || mode > 3) {
        throw Error(ErrorKind::Contract, "mode must be 1, 2 or 3");
    }
    return factors[mode - 1];
}

}  // namespace

std::vector<int> factor_clustering(const CPModel& model, int mode, int k,
                                   std::uint64_t seed) {
    return kmeans(checked_factor(model.factors, mode), k, seed).labels;
}

std::vector<int> factor_clustering(const TuckerModel& model, int mode, int k,
                                   std::uint64_t seed) {
    return kmeans(checked_factor(model.factors, mode), k, seed).labels;
}

}  // namespace mcam
