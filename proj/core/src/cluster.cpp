#include "mcam/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "mcam/error.hpp"
#include "mcam/rng.hpp"

namespace mcam {

namespace {

constexpr int kRestarts = 10;
constexpr int kMaxLloydIterations = 300;
constexpr double kInertiaTolerance = 1e-6;

int nearest_center(const Matrix& points, const Matrix& centers, int k,
                   Eigen::Index row) {
    int best = 0;
    double best_d = (points.row(row) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double d = (points.row(row) - centers.row(c)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

KMeansResult lloyd_once(const Matrix& points, int k, Rng& rng) {
    const auto n = points.rows();
    const auto dim = points.cols();

    // k-means++ seeding.
    Matrix centers(k, dim);
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(n)));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (points.row(i) - centers.row(c - 1)).squaredNorm();
            dist2[i] = std::min(dist2[i], d);
            total += dist2[i];
        }
        Eigen::Index pick = n - 1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cum = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += dist2[i];
                if (cum >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining points coincide with a chosen center.
            pick = static_cast<Eigen::Index>(rng.below(n));
        }
        centers.row(c) = points.row(pick);
    }

    std::vector<int> labels(n, 0);
    std::vector<Eigen::Index> counts(k, 0);
    double inertia = std::numeric_limits<double>::infinity();
    std::vector<double> history;

    for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
        bool changed = false;
        double new_inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = nearest_center(points, centers, k, i);
            if (c != labels[i]) {
                labels[i] = c;
                changed = true;
            }
            new_inertia += (points.row(i) - centers.row(c)).squaredNorm();
        }
        history.push_back(new_inertia);

        std::fill(counts.begin(), counts.end(), 0);
        Matrix sums = Matrix::Zero(k, dim);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(labels[i]) += points.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
            } else {
                // Re-seed an empty cluster with the point farthest from its
                // current center; keeps every cluster id populated.
                Eigen::Index worst = 0;
                double worst_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (counts[labels[i]] <= 1) continue;
                    const double d =
                        (points.row(i) - centers.row(labels[i])).squaredNorm();
                    if (d > worst_d) {
                        worst_d = d;
                        worst = i;
                    }
                }
                --counts[labels[worst]];
                labels[worst] = c;
                counts[c] = 1;
                centers.row(c) = points.row(worst);
                changed = true;
            }
        }

        const bool tol_hit =
            std::isfinite(inertia) &&
            inertia - new_inertia <= kInertiaTolerance * std::max(new_inertia, 1e-300);
        inertia = new_inertia;
        if (!changed || tol_hit) break;
    }

    // Final inertia against the final centers.
    double final_inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        labels[i] = nearest_center(points, centers, k, i);
        final_inertia += (points.row(i) - centers.row(labels[i])).squaredNorm();
    }
    history.push_back(final_inertia);
    return {std::move(labels), final_inertia, std::move(history)};
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed) {
    const auto n = points.rows();
    if (n == 0) {
        throw Error(ErrorKind::Contract, "kmeans needs at least one point");
    }
    if (k < 1 || k > n) {
        throw Error(ErrorKind::Contract,
                    "k = " + std::to_string(k) + " outside [1, " +
                        std::to_string(n) + "]");
    }

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < kRestarts; ++restart) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
        KMeansResult result = lloyd_once(points, k, rng);
        if (result.inertia < best.inertia) best = std::move(result);
        if (best.inertia == 0.0) break;
    }

    // Make label ids stable: relabel clusters by first occurrence.
    std::vector<int> remap(k, -1);
    int next = 0;
    for (int& l : best.labels) {
        if (remap[l] < 0) remap[l] = next++;
        l = remap[l];
    }
    return best;
}

ModeClustering spectral_clustering(const AffinityMatrix& a, int k,
                                   std::uint64_t seed) {
    const auto m = a.values.rows();
    if (k < 1 || k > m) {
        throw Error(ErrorKind::Contract,
                    "k = " + std::to_string(k) + " outside [1, " +
                        std::to_string(m) + "]");
    }

    const Vector degree = a.values.rowwise().sum();
    std::vector<Eigen::Index> active;   // rows with nonzero degree
    std::vector<Eigen::Index> isolated; // all-zero rows become singletons
    for (Eigen::Index i = 0; i < m; ++i) {
        (degree(i) > 0.0 ? active : isolated).push_back(i);
    }
    if (active.empty()) {
        throw Error(ErrorKind::Degenerate, "affinity matrix is identically zero");
    }

    const auto ma = static_cast<Eigen::Index>(active.size());
    const int k_eff = std::max(1, k - static_cast<int>(isolated.size()));
    // k <= m implies k_eff <= ma.

    Vector inv_sqrt(ma);
    for (Eigen::Index i = 0; i < ma; ++i) inv_sqrt(i) = 1.0 / std::sqrt(degree(active[i]));

    Matrix lap(ma, ma);
    for (Eigen::Index i = 0; i < ma; ++i) {
        for (Eigen::Index j = 0; j < ma; ++j) {
            const double nij =
                a.values(active[i], active[j]) * inv_sqrt(i) * inv_sqrt(j);
            lap(i, j) = (i == j ? 1.0 : 0.0) - nij;
        }
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(lap);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Numeric, "Laplacian eigendecomposition failed");
    }

    // Ascending eigenvalues: the first k_eff columns span the embedding.
    Matrix embedding = solver.eigenvectors().leftCols(k_eff);
    for (Eigen::Index i = 0; i < ma; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }

    const KMeansResult km = kmeans(embedding, k_eff, seed);
    // kmeans labels are compacted by first occurrence; a final reassignment
    // pass can drop below k_eff distinct ids, so count what actually came out.
    int k_used = 0;
    for (int l : km.labels) k_used = std::max(k_used, l + 1);

    ModeClustering result;
    result.mode = a.mode;
    result.labels.assign(m, -1);
    for (Eigen::Index i = 0; i < ma; ++i) result.labels[active[i]] = km.labels[i];
    int next = k_used;
    for (Eigen::Index i : isolated) result.labels[i] = next++;
    result.cluster_count = next;
    return result;
}

ModeClustering affinity_propagation(const AffinityMatrix& a,
                                    const APParams& params) {
    const auto m = a.values.rows();
    if (m < 2) {
        throw Error(ErrorKind::Contract,
                    "affinity propagation needs at least two points");
    }
    if (params.damping < 0.5 || params.damping >= 1.0) {
        throw Error(ErrorKind::Contract, "damping must lie in [0.5, 1)");
    }
    if (params.convergence_window >= params.max_iterations) {
        throw Error(ErrorKind::Contract,
                    "convergence window must be smaller than max iterations");
    }

    double preference;
    if (params.preference) {
        preference = *params.preference;
    } else {
        std::vector<double> off;
        off.reserve(static_cast<std::size_t>(m) * (m - 1));
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                if (i != j) off.push_back(a.values(i, j));
        std::sort(off.begin(), off.end());
        const std::size_t half = off.size() / 2;
        preference = off.size() % 2 == 1
                         ? off[half]
                         : 0.5 * (off[half - 1] + off[half]);
    }

    Matrix s = a.values;
    s.diagonal().setConstant(preference);

    // Exactly symmetric inputs make the message passing degenerate (whole
    // blocks elect or abandon exemplars in lockstep). Break ties with an
    // infinitesimal, hash-derived jitter; fixed inputs still give fixed
    // outputs. Labels are assigned from the unjittered similarities.
    {
        const double amplitude =
            1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const std::uint64_t h = derive_seed(
                    0x61705f6a69747465ULL,
                    static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(m) +
                        static_cast<std::uint64_t>(j));
                s(i, j) += amplitude * (static_cast<double>(h >> 11) * 0x1.0p-53);
            }
        }
    }

    Matrix resp = Matrix::Zero(m, m);
    Matrix avail = Matrix::Zero(m, m);
    const double keep = params.damping;
    const double mix = 1.0 - params.damping;

    std::vector<char> exemplar(m, 0);
    int stable_iterations = 0;
    bool converged = false;

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        // Responsibilities.
        for (Eigen::Index i = 0; i < m; ++i) {
            double max1 = -std::numeric_limits<double>::infinity();
            double max2 = max1;
            Eigen::Index arg = -1;
            for (Eigen::Index j = 0; j < m; ++j) {
                const double v = avail(i, j) + s(i, j);
                if (v > max1) {
                    max2 = max1;
                    max1 = v;
                    arg = j;
                } else if (v > max2) {
                    max2 = v;
                }
            }
            for (Eigen::Index j = 0; j < m; ++j) {
                const double bound = (j == arg) ? max2 : max1;
                resp(i, j) = keep * resp(i, j) + mix * (s(i, j) - bound);
            }
        }

        // Availabilities.
        for (Eigen::Index j = 0; j < m; ++j) {
            double positive_sum = 0.0;
            for (Eigen::Index i = 0; i < m; ++i)
                if (i != j) positive_sum += std::max(0.0, resp(i, j));
            for (Eigen::Index i = 0; i < m; ++i) {
                double value;
                if (i == j) {
                    value = positive_sum;
                } else {
                    value = std::min(0.0, resp(j, j) + positive_sum -
                                              std::max(0.0, resp(i, j)));
                }
                avail(i, j) = keep * avail(i, j) + mix * value;
            }
        }

        bool any = false;
        bool changed = false;
        for (Eigen::Index j = 0; j < m; ++j) {
            const char e = (resp(j, j) + avail(j, j) > 0.0) ? 1 : 0;
            if (e != exemplar[j]) changed = true;
            exemplar[j] = e;
            any = any || e;
        }
        if (any && !changed) {
            if (++stable_iterations >= params.convergence_window) {
                converged = true;
                break;
            }
        } else {
            stable_iterations = 0;
        }
    }

    std::vector<int> exemplar_ids;
    for (Eigen::Index j = 0; j < m; ++j)
        if (exemplar[j]) exemplar_ids.push_back(static_cast<int>(j));
    if (exemplar_ids.empty()) {
        // No point elected itself; fall back to the strongest candidate.
        Eigen::Index best = 0;
        double best_v = resp(0, 0) + avail(0, 0);
        for (Eigen::Index j = 1; j < m; ++j) {
            const double v = resp(j, j) + avail(j, j);
            if (v > best_v) {
                best_v = v;
                best = j;
            }
        }
        exemplar_ids.push_back(static_cast<int>(best));
    }

    ModeClustering result;
    result.mode = a.mode;
    result.converged = converged;
    result.exemplars = exemplar_ids;
    result.cluster_count = static_cast<int>(exemplar_ids.size());
    result.labels.assign(m, 0);
    for (Eigen::Index i = 0; i < m; ++i) {
        int best_cluster = 0;
        double best_s = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < exemplar_ids.size(); ++c) {
            const Eigen::Index e = exemplar_ids[c];
            if (e == i) {
                best_cluster = static_cast<int>(c);
                break;
            }
            if (a.values(i, e) > best_s) {
                best_s = a.values(i, e);
                best_cluster = static_cast<int>(c);
            }
        }
        result.labels[i] = best_cluster;
    }
    return result;
}

}  // namespace mcam
