#include "mcam/tensor.hpp"

#include <cmath>
#include <string>

#include "mcam/error.hpp"

namespace mcam {

namespace {

void check_mode(int mode) {
    if (mode < 1 || mode > 3) {
        throw Error(ErrorKind::Contract,
                    "mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
}

}  // namespace

Tensor3::Tensor3(std::size_t m1, std::size_t m2, std::size_t m3,
                 std::vector<double> values)
    : dims_{m1, m2, m3}, values_(std::move(values)) {
    if (m1 == 0 || m2 == 0 || m3 == 0) {
        throw Error(ErrorKind::Contract, "tensor dimensions must be positive");
    }
    if (values_.size() != m1 * m2 * m3) {
        throw Error(ErrorKind::Contract,
                    "tensor data length " + std::to_string(values_.size()) +
                        " does not match dims product " +
                        std::to_string(m1 * m2 * m3));
    }
}

Tensor3 Tensor3::zeros(std::size_t m1, std::size_t m2, std::size_t m3) {
    return Tensor3(m1, m2, m3, std::vector<double>(m1 * m2 * m3, 0.0));
}

std::size_t Tensor3::dim(int mode) const {
    check_mode(mode);
    return dims_[static_cast<std::size_t>(mode - 1)];
}

double Tensor3::frobenius_norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
}

Matrix slice(const Tensor3& t, int mode, std::size_t index) {
    check_mode(mode);
    const auto [m1, m2, m3] = t.dims();
    if (index >= t.dim(mode)) {
        throw Error(ErrorKind::Bounds,
                    "slice index " + std::to_string(index) +
                        " out of range for mode " + std::to_string(mode) +
                        " of extent " + std::to_string(t.dim(mode)));
    }

    if (mode == 1) {
        Matrix s(m2, m3);
        for (std::size_t i2 = 0; i2 < m2; ++i2)
            for (std::size_t i3 = 0; i3 < m3; ++i3) s(i2, i3) = t(index, i2, i3);
        return s;
    }
    if (mode == 2) {
        Matrix s(m1, m3);
        for (std::size_t i1 = 0; i1 < m1; ++i1)
            for (std::size_t i3 = 0; i3 < m3; ++i3) s(i1, i3) = t(i1, index, i3);
        return s;
    }
    Matrix s(m1, m2);
    for (std::size_t i1 = 0; i1 < m1; ++i1)
        for (std::size_t i2 = 0; i2 < m2; ++i2) s(i1, i2) = t(i1, i2, index);
    return s;
}

Matrix unfold(const Tensor3& t, int mode) {
    check_mode(mode);
    const auto [m1, m2, m3] = t.dims();

    if (mode == 1) {
        Matrix u(m1, m2 * m3);
        for (std::size_t i1 = 0; i1 < m1; ++i1)
            for (std::size_t i2 = 0; i2 < m2; ++i2)
                for (std::size_t i3 = 0; i3 < m3; ++i3)
                    u(i1, i3 * m2 + i2) = t(i1, i2, i3);
        return u;
    }
    if (mode == 2) {
        Matrix u(m2, m1 * m3);
        for (std::size_t i1 = 0; i1 < m1; ++i1)
            for (std::size_t i2 = 0; i2 < m2; ++i2)
                for (std::size_t i3 = 0; i3 < m3; ++i3)
                    u(i2, i3 * m1 + i1) = t(i1, i2, i3);
        return u;
    }
    Matrix u(m3, m1 * m2);
    for (std::size_t i1 = 0; i1 < m1; ++i1)
        for (std::size_t i2 = 0; i2 < m2; ++i2)
            for (std::size_t i3 = 0; i3 < m3; ++i3)
                u(i3, i2 * m1 + i1) = t(i1, i2, i3);
    return u;
}

}  // namespace mcam
