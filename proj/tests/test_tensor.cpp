#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "mcam/error.hpp"
#include "mcam/rng.hpp"
#include "mcam/tensor.hpp"
#include "mcam/tensor_io.hpp"

using namespace mcam;

namespace {

Tensor3 iota_tensor(std::size_t m1, std::size_t m2, std::size_t m3) {
    std::vector<double> values(m1 * m2 * m3);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
    return Tensor3(m1, m2, m3, std::move(values));
}

Tensor3 random_tensor(std::size_t m1, std::size_t m2, std::size_t m3,
                      std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> values(m1 * m2 * m3);
    for (double& v : values) v = rng.normal();
    return Tensor3(m1, m2, m3, std::move(values));
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("tensor construction validates dims and length") {
    CHECK_THROWS_AS(Tensor3(2, 2, 2, std::vector<double>(7)), Error);
    CHECK_THROWS_AS(Tensor3(0, 2, 2, {}), Error);
    const Tensor3 t = Tensor3::zeros(3, 4, 5);
    CHECK(t.size() == 60);
    CHECK(t.dim(2) == 4);
}

TEST_CASE("slice orientation follows the lower-mode-rows rule") {
    const Tensor3 t = iota_tensor(2, 2, 2);

    // Mode 1, index 0: entries t(0,i2,i3) = i2*2 + i3.
    const Matrix s1 = slice(t, 1, 0);
    CHECK(s1.rows() == 2);
    CHECK(s1(0, 0) == 0);
    CHECK(s1(0, 1) == 1);
    CHECK(s1(1, 0) == 2);
    CHECK(s1(1, 1) == 3);

    // Mode 3, index 1: rows are mode 1, columns mode 2. Flat offsets with
    // i3 = 1: t(0,0,1)=1, t(0,1,1)=3, t(1,0,1)=5, t(1,1,1)=7.
    const Matrix s3 = slice(t, 3, 1);
    CHECK(s3(0, 0) == 1);
    CHECK(s3(0, 1) == 3);
    CHECK(s3(1, 0) == 5);
    CHECK(s3(1, 1) == 7);

    // Mode 2 slice of an all-zero 3x4x5 tensor is a 3x5 zero matrix.
    const Matrix s2 = slice(Tensor3::zeros(3, 4, 5), 2, 0);
    CHECK(s2.rows() == 3);
    CHECK(s2.cols() == 5);
    CHECK(s2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("slice bounds errors name the mode and index") {
    const Tensor3 t = iota_tensor(2, 3, 4);
    try {
        slice(t, 2, 3);
        FAIL("expected bounds error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Bounds);
        CHECK(std::string(e.what()).find("mode 2") != std::string::npos);
        CHECK(std::string(e.what()).find('3') != std::string::npos);
    }
    CHECK_THROWS_AS(slice(t, 4, 0), Error);
}

TEST_CASE("slices reassemble the tensor for every mode") {
    const Tensor3 t = random_tensor(3, 4, 5, 17);
    for (int mode = 1; mode <= 3; ++mode) {
        for (std::size_t idx = 0; idx < t.dim(mode); ++idx) {
            const Matrix s = slice(t, mode, idx);
            for (Eigen::Index r = 0; r < s.rows(); ++r) {
                for (Eigen::Index c = 0; c < s.cols(); ++c) {
                    double expected;
                    if (mode == 1) expected = t(idx, r, c);
                    else if (mode == 2) expected = t(r, idx, c);
                    else expected = t(r, c, idx);
                    CHECK(s(r, c) == expected);
                }
            }
        }
    }
}

TEST_CASE("unfold columns follow the lower-mode-fastest convention") {
    const Tensor3 t = iota_tensor(2, 3, 4);
    const Matrix u1 = unfold(t, 1);
    CHECK(u1.rows() == 2);
    CHECK(u1.cols() == 12);
    // column for (i2,i3) is i3*m2 + i2
    CHECK(u1(1, 2 * 3 + 1) == t(1, 1, 2));
    const Matrix u3 = unfold(t, 3);
    CHECK(u3(3, 2 * 2 + 1) == t(1, 2, 3));
}

TEST_CASE("t3b1 round-trip is bit exact") {
    const auto path = temp_file("mcam_roundtrip.t3b");

    const Tensor3 tiny(1, 1, 1, {42.0});
    save_tensor(tiny, path);
    CHECK(load_tensor(path)(0, 0, 0) == 42.0);

    const Tensor3 t = random_tensor(2, 3, 4, 99);
    save_tensor(t, path);
    const Tensor3 back = load_tensor(path);
    CHECK(back.dims() == t.dims());
    REQUIRE(back.values().size() == t.values().size());
    CHECK(std::memcmp(back.values().data(), t.values().data(),
                      t.values().size() * sizeof(double)) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("t3b1 loader rejects malformed files with offsets") {
    const auto path = temp_file("mcam_bad.t3b");

    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << "XXXXrest of file";
    }
    try {
        load_tensor(path);
        FAIL("expected format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Format);
        CHECK(std::string(e.what()).find("offset 0") != std::string::npos);
    }

    // Valid header followed by a truncated payload.
    const Tensor3 t = random_tensor(2, 2, 2, 3);
    save_tensor(t, path);
    {
        std::error_code ec;
        std::filesystem::resize_file(path, 28 + 5 * 8 + 3, ec);
        REQUIRE(!ec);
    }
    try {
        load_tensor(path);
        FAIL("expected format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Format);
        CHECK(std::string(e.what()).find("truncated payload") != std::string::npos);
    }

    // Trailing garbage.
    save_tensor(t, path);
    {
        std::ofstream out(path, std::ios::binary | std::ios::app);
        out << "zz";
    }
    CHECK_THROWS_AS(load_tensor(path), Error);
    std::filesystem::remove(path);
}

TEST_CASE("csv loader fills unlisted cells with zero") {
    const auto path = temp_file("mcam_triples.csv");
    {
        std::ofstream out(path, std::ios::trunc);
        out << "2,2,2\n0,0,0,1.5\n1,1,1,-2.25\n";
    }
    const Tensor3 t = load_tensor_csv(path);
    CHECK(t(0, 0, 0) == 1.5);
    CHECK(t(1, 1, 1) == -2.25);
    CHECK(t(0, 1, 0) == 0.0);

    {
        std::ofstream out(path, std::ios::trunc);
        out << "2,2\n";
    }
    CHECK_THROWS_AS(load_tensor_csv(path), Error);

    {
        std::ofstream out(path, std::ios::trunc);
        out << "2,2,2\n5,0,0,1.0\n";
    }
    CHECK_THROWS_AS(load_tensor_csv(path), Error);
    std::filesystem::remove(path);
}
