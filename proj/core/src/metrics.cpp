#include "mcam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "mcam/error.hpp"

namespace mcam {

namespace {

struct Contingency {
    std::vector<std::vector<std::size_t>> table;  // rows: a classes, cols: b
    std::vector<std::size_t> row_sums;
    std::vector<std::size_t> col_sums;
    std::size_t n = 0;
};

std::vector<int> compact_labels(const std::vector<int>& labels) {
    std::map<int, int> ids;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto [it, inserted] =
            ids.emplace(labels[i], static_cast<int>(ids.size()));
        out[i] = it->second;
    }
    return out;
}

Contingency contingency(const std::vector<int>& labels_a,
                        const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size()) {
        throw Error(ErrorKind::Contract,
                    "label vectors differ in length: " +
                        std::to_string(labels_a.size()) + " vs " +
                        std::to_string(labels_b.size()));
    }
    if (labels_a.size() < 2) {
        throw Error(ErrorKind::Contract, "need at least two labeled items");
    }
    const auto a = compact_labels(labels_a);
    const auto b = compact_labels(labels_b);
    const int ka = 1 + *std::max_element(a.begin(), a.end());
    const int kb = 1 + *std::max_element(b.begin(), b.end());

    Contingency c;
    c.n = a.size();
    c.table.assign(ka, std::vector<std::size_t>(kb, 0));
    c.row_sums.assign(ka, 0);
    c.col_sums.assign(kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++c.table[a[i]][b[i]];
        ++c.row_sums[a[i]];
        ++c.col_sums[b[i]];
    }
    return c;
}

double choose2(std::size_t n) {
    return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

}  // namespace

double ari(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    const Contingency c = contingency(labels_a, labels_b);

    double index = 0.0;
    for (const auto& row : c.table)
        for (std::size_t nij : row) index += choose2(nij);
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t v : c.row_sums) sum_a += choose2(v);
    for (std::size_t v : c.col_sums) sum_b += choose2(v);

    const double expected = sum_a * sum_b / choose2(c.n);
    const double maximum = 0.5 * (sum_a + sum_b);
    if (maximum == expected) {
        // Both partitions trivial (all singletons or one cluster): agreement.
        return 1.0;
    }
    return (index - expected) / (maximum - expected);
}

double nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    const Contingency c = contingency(labels_a, labels_b);
    const double n = static_cast<double>(c.n);

    double mi = 0.0;
    for (std::size_t i = 0; i < c.row_sums.size(); ++i) {
        for (std::size_t j = 0; j < c.col_sums.size(); ++j) {
            const std::size_t nij = c.table[i][j];
            if (nij == 0) continue;
            const double pij = static_cast<double>(nij) / n;
            mi += pij * std::log(static_cast<double>(nij) * n /
                                 (static_cast<double>(c.row_sums[i]) *
                                  static_cast<double>(c.col_sums[j])));
        }
    }
    auto entropy = [n](const std::vector<std::size_t>& sums) {
        double h = 0.0;
        for (std::size_t v : sums) {
            if (v == 0) continue;
            const double p = static_cast<double>(v) / n;
            h -= p * std::log(p);
        }
        return h;
    };
    const double denom = 0.5 * (entropy(c.row_sums) + entropy(c.col_sums));
    if (denom == 0.0) return 0.0;
    const double value = mi / denom;
    return std::clamp(value, 0.0, 1.0);
}

SilhouetteSelection silhouette_select_k(const AffinityMatrix& a, int k_min,
                                        int k_max, std::uint64_t seed) {
    const auto m = a.values.rows();
    if (k_min < 2 || k_min > k_max || k_max >= m) {
        throw Error(ErrorKind::Contract,
                    "silhouette range must satisfy 2 <= k_min <= k_max < m");
    }

    SilhouetteSelection selection;
    double best_score = -2.0;
    for (int k = k_min; k <= k_max; ++k) {
        const ModeClustering clustering = spectral_clustering(a, k, seed);
        const std::vector<int>& labels = clustering.labels;
        const int kc = clustering.cluster_count;

        std::vector<std::size_t> sizes(kc, 0);
        for (int l : labels) ++sizes[l];

        double total = 0.0;
        std::vector<double> mean_to(kc, 0.0);
        for (Eigen::Index i = 0; i < m; ++i) {
            if (sizes[labels[i]] <= 1) continue;  // singleton contributes 0
            std::fill(mean_to.begin(), mean_to.end(), 0.0);
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j == i) continue;
                mean_to[labels[j]] += 1.0 - a.values(i, j);
            }
            for (int cluster = 0; cluster < kc; ++cluster) {
                const std::size_t sz = sizes[cluster];
                if (cluster == labels[i]) {
                    mean_to[cluster] /= static_cast<double>(sz - 1);
                } else if (sz > 0) {
                    mean_to[cluster] /= static_cast<double>(sz);
                }
            }
            const double within = mean_to[labels[i]];
            double nearest = std::numeric_limits<double>::infinity();
            for (int cluster = 0; cluster < kc; ++cluster) {
                if (cluster != labels[i] && sizes[cluster] > 0) {
                    nearest = std::min(nearest, mean_to[cluster]);
                }
            }
            const double denom = std::max(within, nearest);
            if (denom > 0.0 && std::isfinite(nearest)) {
                total += (nearest - within) / denom;
            }
        }
        const double score = total / static_cast<double>(m);
        selection.scores.emplace_back(k, score);
        if (score > best_score) {
            best_score = score;
            selection.best_k = k;
        }
    }
    return selection;
}

namespace {

int label_count(const std::vector<int>& labels, std::size_t expected_size,
                int mode) {
    if (labels.size() != expected_size) {
        throw Error(ErrorKind::Contract,
                    "mode " + std::to_string(mode) + " labels length " +
                        std::to_string(labels.size()) +
                        " does not match tensor extent " +
                        std::to_string(expected_size));
    }
    int k = 0;
    for (int l : labels) {
        if (l < 0) {
            throw Error(ErrorKind::Contract, "negative cluster label");
        }
        k = std::max(k, l + 1);
    }
    return k;
}

}  // namespace

BlockModel build_block_model(const Tensor3& t, const MultiwayClustering& mc) {
    const auto [m1, m2, m3] = t.dims();
    BlockModel model;
    model.cluster_counts = {label_count(mc.labels[0], m1, 1),
                            label_count(mc.labels[1], m2, 2),
                            label_count(mc.labels[2], m3, 3)};
    const auto [k1, k2, k3] = model.cluster_counts;
    const std::size_t blocks = static_cast<std::size_t>(k1) * k2 * k3;
    model.means.assign(blocks, 0.0);
    model.counts.assign(blocks, 0);

    for (std::size_t i1 = 0; i1 < m1; ++i1) {
        for (std::size_t i2 = 0; i2 < m2; ++i2) {
            for (std::size_t i3 = 0; i3 < m3; ++i3) {
                const std::size_t b =
                    (static_cast<std::size_t>(mc.labels[0][i1]) * k2 +
                     mc.labels[1][i2]) *
                        k3 +
                    mc.labels[2][i3];
                model.means[b] += t(i1, i2, i3);
                ++model.counts[b];
            }
        }
    }
    for (std::size_t b = 0; b < blocks; ++b) {
        if (model.counts[b] > 0) model.means[b] /= static_cast<double>(model.counts[b]);
    }
    return model;
}

BlockRmseResult block_rmse(const Tensor3& t, const MultiwayClustering& mc) {
    const BlockModel model = build_block_model(t, mc);
    const auto [m1, m2, m3] = t.dims();
    const auto [k1, k2, k3] = model.cluster_counts;

    std::vector<double> sq(model.means.size(), 0.0);
    for (std::size_t i1 = 0; i1 < m1; ++i1) {
        for (std::size_t i2 = 0; i2 < m2; ++i2) {
            for (std::size_t i3 = 0; i3 < m3; ++i3) {
                const std::size_t b =
                    (static_cast<std::size_t>(mc.labels[0][i1]) * k2 +
                     mc.labels[1][i2]) *
                        k3 +
                    mc.labels[2][i3];
                const double dev = t(i1, i2, i3) - model.means[b];
                sq[b] += dev * dev;
            }
        }
    }

    BlockRmseResult result;
    double sum = 0.0;
    for (std::size_t b = 0; b < sq.size(); ++b) {
        if (model.counts[b] == 0) continue;  // empty blocks are skipped
        const double rmse = std::sqrt(sq[b] / static_cast<double>(model.counts[b]));
        result.per_block.push_back(rmse);
        result.block_ids.push_back({static_cast<int>(b / (k2 * k3)),
                                    static_cast<int>(b / k3 % k2),
                                    static_cast<int>(b % k3)});
        sum += rmse;
    }
    result.mean = result.per_block.empty()
                      ? 0.0
                      : sum / static_cast<double>(result.per_block.size());
    return result;
}

}  // namespace mcam
