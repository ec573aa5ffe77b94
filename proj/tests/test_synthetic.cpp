#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mcam/error.hpp"
#include "mcam/synthetic.hpp"

using namespace mcam;

TEST_CASE("single block fills with gamma over the root of the block volume") {
    SyntheticSpec spec;
    spec.dims = {2, 2, 2};
    spec.clusters[0] = {{0, 1}};
    spec.clusters[1] = {{0, 1}};
    spec.clusters[2] = {{0, 1}};
    spec.gamma = {1.0};
    spec.noise = false;
    const auto [t, truth] = generate(spec);

    const double expected = 1.0 / std::pow(2.0, 1.5);  // 0.353553...
    for (double v : t.values()) {
        CHECK(v == doctest::Approx(expected).epsilon(1e-15));
    }
    CHECK(truth.labels[0] == std::vector<int>{0, 0});
}

TEST_CASE("entries outside every block are exactly zero") {
    SyntheticSpec spec;
    spec.dims = {4, 4, 4};
    spec.clusters[0] = {{0, 1}};
    spec.clusters[1] = {{1, 2}};
    spec.clusters[2] = {{2, 3}};
    spec.gamma = {7.0};
    spec.noise = false;
    const auto [t, truth] = generate(spec);

    for (std::size_t i1 = 0; i1 < 4; ++i1) {
        for (std::size_t i2 = 0; i2 < 4; ++i2) {
            for (std::size_t i3 = 0; i3 < 4; ++i3) {
                const bool in_block = (i1 <= 1) && (i2 == 1 || i2 == 2) &&
                                      (i3 == 2 || i3 == 3);
                if (!in_block) CHECK(t(i1, i2, i3) == 0.0);
                else CHECK(t(i1, i2, i3) != 0.0);
            }
        }
    }
    CHECK(truth.background_label == 1);
    CHECK(truth.labels[0] == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("noise-off frobenius norm squared equals the weight sum of squares") {
    SyntheticSpec spec;
    spec.dims = {9, 9, 9};
    spec.clusters[0] = {{0, 1, 2}, {4, 5}};
    spec.clusters[1] = {{0, 1}, {2, 3, 4}};
    spec.clusters[2] = {{5, 6}, {7, 8}};
    spec.gamma = {3.0, 4.0};
    spec.noise = false;
    const auto [t, truth] = generate(spec);
    const double fro2 = t.frobenius_norm() * t.frobenius_norm();
    CHECK(fro2 == doctest::Approx(9.0 + 16.0).epsilon(1e-12));
}

TEST_CASE("generation is bit-deterministic in the seed") {
    const SyntheticSpec spec = uniform_block_spec(12, 3, 4, 10.0, true, 77);
    const auto [t1, g1] = generate(spec);
    const auto [t2, g2] = generate(spec);
    CHECK(t1.values() == t2.values());

    SyntheticSpec other = spec;
    other.seed = 78;
    const auto [t3, g3] = generate(other);
    CHECK(t1.values() != t3.values());
}

TEST_CASE("uniform block spec matches the experiment layout") {
    const SyntheticSpec spec = uniform_block_spec(100, 9, 11, 55.0, true, 0);
    CHECK(spec.dims[0] == 100);
    CHECK(spec.clusters[0].size() == 9);
    CHECK(spec.clusters[0][8].back() == 98);  // index 99 stays uncovered
    const auto [t, truth] = generate(spec);
    CHECK(truth.labels[0][99] == 9);  // background label
    CHECK(truth.labels[1][0] == 0);
    CHECK(truth.labels[2][55] == 5);
}

TEST_CASE("overlapping index sets are rejected") {
    SyntheticSpec spec;
    spec.dims = {4, 4, 4};
    spec.clusters[0] = {{0, 1}, {1, 2}};
    spec.clusters[1] = {{0, 1}, {2, 3}};
    spec.clusters[2] = {{0, 1}, {2, 3}};
    spec.gamma = {1.0, 1.0};
    try {
        generate(spec);
        FAIL("expected contract error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
}

TEST_CASE("component count above the smallest dimension is rejected") {
    SyntheticSpec spec;
    spec.dims = {2, 4, 4};
    spec.clusters[0] = {{0}, {1}, {2}};
    spec.clusters[1] = {{0}, {1}, {2}};
    spec.clusters[2] = {{0}, {1}, {2}};
    spec.gamma = {1, 1, 1};
    CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("spec json round trip and validation") {
    const char* doc = R"({
        "dims": [4, 5, 6],
        "clusters": [[[0,1],[2,3]], [[0,1],[3,4]], [[0],[5]]],
        "gamma": 12.5,
        "noise": false,
        "seed": 9
    })";
    const SyntheticSpec spec = parse_spec_json(doc);
    CHECK(spec.dims == std::array<std::size_t, 3>{4, 5, 6});
    CHECK(spec.gamma == std::vector<double>{12.5, 12.5});
    CHECK_FALSE(spec.noise);
    CHECK(spec.seed == 9);
    CHECK(spec.clusters[2][1] == std::vector<std::size_t>{5});

    CHECK_THROWS_AS(parse_spec_json("{"), Error);
    CHECK_THROWS_AS(parse_spec_json(R"({"dims":[1,2]})"), Error);
    try {
        parse_spec_json(R"({"dims":[2,2,2],"clusters":[[[0]],[[0]]],"gamma":1})");
        FAIL("expected format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Format);
    }
}

TEST_CASE("ground truth csv round trip") {
    SyntheticSpec spec = uniform_block_spec(6, 2, 2, 3.0, false, 0);
    const auto [t, truth] = generate(spec);
    const auto path = std::filesystem::temp_directory_path() / "mcam_truth.csv";
    save_ground_truth_csv(truth, path);
    const GroundTruth back = load_ground_truth_csv(path);
    for (int mode = 0; mode < 3; ++mode) {
        CHECK(back.labels[mode] == truth.labels[mode]);
    }
    std::filesystem::remove(path);
}
