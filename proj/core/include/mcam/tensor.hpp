#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <vector>

namespace mcam {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense 3-order tensor. Storage is flat with mode-1 major order:
/// (i1,i2,i3) lives at offset i1*m2*m3 + i2*m3 + i3, so mode-1 slices are
/// contiguous. Immutable after construction; safe for concurrent reads.
class Tensor3 {
public:
    Tensor3(std::size_t m1, std::size_t m2, std::size_t m3,
            std::vector<double> values);

    static Tensor3 zeros(std::size_t m1, std::size_t m2, std::size_t m3);

    [[nodiscard]] const std::array<std::size_t, 3>& dims() const { return dims_; }
    /// Extent of one mode; mode is 1, 2 or 3.
    [[nodiscard]] std::size_t dim(int mode) const;
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    [[nodiscard]] double operator()(std::size_t i1, std::size_t i2,
                                    std::size_t i3) const {
        return values_[(i1 * dims_[1] + i2) * dims_[2] + i3];
    }

    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    [[nodiscard]] double frobenius_norm() const;

private:
    std::array<std::size_t, 3> dims_;
    std::vector<double> values_;
};

/// Matrix obtained by fixing `index` in `mode`. Rows are indexed by the lower
/// remaining mode, columns by the higher one:
///   mode 1 -> m2 x m3,  mode 2 -> m1 x m3,  mode 3 -> m1 x m2.
Matrix slice(const Tensor3& t, int mode, std::size_t index);

/// Mode-n unfolding, rows = dim(mode). Column order follows the convention
/// where lower remaining modes vary fastest, matching the Khatri-Rao products
/// used by the decomposition baselines.
Matrix unfold(const Tensor3& t, int mode);

}  // namespace mcam
