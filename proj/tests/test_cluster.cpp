#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mcam/cluster.hpp"
#include "mcam/error.hpp"
#include "mcam/metrics.hpp"
#include "mcam/rng.hpp"
#include "mcam/spectra.hpp"
#include "mcam/synthetic.hpp"
#include "oracles.hpp"

using namespace mcam;

namespace {

AffinityMatrix block_diagonal_affinity(const std::vector<int>& block_sizes) {
    int m = 0;
    for (int s : block_sizes) m += s;
    AffinityMatrix a;
    a.mode = 1;
    a.values = Matrix::Zero(m, m);
    int offset = 0;
    for (int s : block_sizes) {
        a.values.block(offset, offset, s, s).setOnes();
        offset += s;
    }
    return a;
}

}  // namespace

TEST_CASE("kmeans separates well-split 1-d pairs") {
    Matrix points(4, 1);
    points << 0.0, 0.1, 10.0, 10.1;
    const KMeansResult result = kmeans(points, 2, 1);
    CHECK(result.labels[0] == result.labels[1]);
    CHECK(result.labels[2] == result.labels[3]);
    CHECK(result.labels[0] != result.labels[2]);
    // Optimal inertia: two pairs at mutual distance 0.1 -> 2 * (0.05^2 * 2).
    CHECK(result.inertia == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("kmeans with k = n gives singletons and zero inertia") {
    Matrix points(5, 2);
    Rng rng(3);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) points(i, j) = rng.normal();
    const KMeansResult result = kmeans(points, 5, 7);
    CHECK(result.inertia == 0.0);
    std::vector<int> sorted = result.labels;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 5; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("kmeans recovers three tight gaussian blobs") {
    Rng rng(11);
    const int per_blob = 30;
    Matrix points(3 * per_blob, 2);
    std::vector<int> truth(3 * per_blob);
    const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
    for (int b = 0; b < 3; ++b) {
        for (int i = 0; i < per_blob; ++i) {
            const int row = b * per_blob + i;
            points(row, 0) = centers[b][0] + 0.1 * rng.normal();
            points(row, 1) = centers[b][1] + 0.1 * rng.normal();
            truth[row] = b;
        }
    }
    const KMeansResult result = kmeans(points, 3, 5);
    CHECK(ari(result.labels, truth) == doctest::Approx(1.0));
}

TEST_CASE("kmeans contract errors") {
    Matrix points(3, 1);
    points << 1, 2, 3;
    CHECK_THROWS_AS(kmeans(points, 4, 0), Error);
    CHECK_THROWS_AS(kmeans(points, 0, 0), Error);
    CHECK_THROWS_AS(kmeans(Matrix(0, 2), 1, 0), Error);
}

TEST_CASE("kmeans inertia never increases across iterations") {
    Rng rng(55);
    Matrix points(60, 4);
    for (Eigen::Index i = 0; i < points.size(); ++i) points(i) = rng.normal();
    const KMeansResult result = kmeans(points, 5, 9);
    REQUIRE(result.inertia_history.size() >= 2);
    for (std::size_t i = 1; i < result.inertia_history.size(); ++i) {
        CHECK(result.inertia_history[i] <=
              result.inertia_history[i - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    Rng rng(99);
    Matrix points(40, 3);
    for (Eigen::Index i = 0; i < points.size(); ++i) points(i) = rng.normal();
    const KMeansResult a = kmeans(points, 4, 123);
    const KMeansResult b = kmeans(points, 4, 123);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("spectral clustering recovers block-diagonal structure") {
    const AffinityMatrix a = block_diagonal_affinity({3, 4});
    const ModeClustering result = spectral_clustering(a, 2, 0);
    const std::vector<int> reference = oracle::connected_components(a.values, 0.5);
    CHECK(ari(result.labels, reference) == doctest::Approx(1.0));
    CHECK(result.cluster_count == 2);
}

TEST_CASE("spectral clustering with identity affinity and k = m") {
    AffinityMatrix a;
    a.mode = 2;
    a.values = Matrix::Identity(5, 5);
    const ModeClustering result = spectral_clustering(a, 5, 1);
    std::vector<int> sorted = result.labels;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 5; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("spectral clustering contract and degenerate errors") {
    const AffinityMatrix a = block_diagonal_affinity({2, 2});
    CHECK_THROWS_AS(spectral_clustering(a, 5, 0), Error);

    AffinityMatrix zero;
    zero.mode = 1;
    zero.values = Matrix::Zero(4, 4);
    try {
        spectral_clustering(zero, 2, 0);
        FAIL("expected degenerate error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Degenerate);
    }
}

TEST_CASE("zero-degree rows become singleton clusters") {
    AffinityMatrix a = block_diagonal_affinity({3, 3});
    a.values.row(2).setZero();
    a.values.col(2).setZero();
    const ModeClustering result = spectral_clustering(a, 3, 0);
    // Point 2 is isolated: its label is not shared with anyone.
    for (int i = 0; i < 6; ++i) {
        if (i != 2) CHECK(result.labels[i] != result.labels[2]);
    }
    CHECK(result.cluster_count == 3);
}

TEST_CASE("spectral clustering is equivariant under permutation") {
    const AffinityMatrix a = block_diagonal_affinity({4, 3, 5});
    const ModeClustering base = spectral_clustering(a, 3, 9);

    // Apply a fixed permutation to rows and columns.
    const std::vector<int> perm = {7, 2, 9, 0, 4, 11, 1, 8, 3, 10, 5, 6};
    AffinityMatrix permuted;
    permuted.mode = 1;
    permuted.values = Matrix::Zero(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            permuted.values(perm[i], perm[j]) = a.values(i, j);

    const ModeClustering shuffled = spectral_clustering(permuted, 3, 9);
    std::vector<int> unshuffled(12);
    for (int i = 0; i < 12; ++i) unshuffled[i] = shuffled.labels[perm[i]];
    CHECK(ari(base.labels, unshuffled) == doctest::Approx(1.0));
}

TEST_CASE("affinity propagation on two clean blocks") {
    const AffinityMatrix a = block_diagonal_affinity({3, 4});
    const ModeClustering result = affinity_propagation(a);
    CHECK(result.converged);
    CHECK(result.cluster_count == 2);
    CHECK(result.exemplars.size() == 2);
    const std::vector<int> reference = oracle::connected_components(a.values, 0.5);
    CHECK(ari(result.labels, reference) == doctest::Approx(1.0));
}

TEST_CASE("affinity propagation matches a naive reference trace") {
    // Generic similarity matrices (no exact ties), same damping and
    // preference; the naive implementation recomputes every message from
    // scratch with O(n^3) updates.
    Rng rng(12345);
    for (int trial = 0; trial < 3; ++trial) {
        const int m = 7 + trial;
        AffinityMatrix a;
        a.mode = 1;
        a.values = Matrix::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                a.values(i, j) = a.values(j, i) = rng.uniform();
            }
            a.values(i, i) = 1.0;
        }
        APParams params;
        params.preference = 0.3;
        const ModeClustering mine = affinity_propagation(a, params);
        const std::vector<int> naive = oracle::affinity_propagation_naive(
            a.values, 0.3, params.damping, params.max_iterations);
        CHECK(mine.labels == naive);
    }
}

TEST_CASE("two points with strong mutual similarity form one cluster") {
    // With preference far below the mutual similarity, electing two exemplars
    // costs 2*pref while one exemplar costs pref + s = pref + 1; the messages
    // settle on a single exemplar.
    AffinityMatrix a;
    a.mode = 1;
    a.values = Matrix::Ones(2, 2);
    APParams params;
    params.preference = -10.0;
    const ModeClustering result = affinity_propagation(a, params);
    CHECK(result.cluster_count == 1);
    CHECK(result.labels[0] == result.labels[1]);
}

TEST_CASE("affinity propagation reports non-convergence without error") {
    const AffinityMatrix a = block_diagonal_affinity({3, 4});
    APParams params;
    params.max_iterations = 2;
    params.convergence_window = 1;
    const ModeClustering result = affinity_propagation(a, params);
    CHECK_FALSE(result.converged);
    CHECK(result.cluster_count >= 1);
}

TEST_CASE("affinity propagation contract errors") {
    AffinityMatrix tiny;
    tiny.mode = 1;
    tiny.values = Matrix::Ones(1, 1);
    CHECK_THROWS_AS(affinity_propagation(tiny), Error);

    const AffinityMatrix a = block_diagonal_affinity({2, 2});
    APParams bad;
    bad.damping = 0.3;
    CHECK_THROWS_AS(affinity_propagation(a, bad), Error);
    bad.damping = 0.5;
    bad.convergence_window = 500;
    CHECK_THROWS_AS(affinity_propagation(a, bad), Error);
}

TEST_CASE("every member is assigned to its most similar exemplar") {
    Rng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const int m = 8 + static_cast<int>(rng.below(6));
        AffinityMatrix a;
        a.mode = 1;
        a.values = Matrix::Zero(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                a.values(i, j) = a.values(j, i) = rng.uniform();

        const ModeClustering result = affinity_propagation(a);
        for (int i = 0; i < m; ++i) {
            const int e = result.exemplars[result.labels[i]];
            if (e == i) continue;
            for (int other : result.exemplars) {
                if (other == i) continue;
                CHECK(a.values(i, e) >= a.values(i, other));
            }
        }
    }
}
