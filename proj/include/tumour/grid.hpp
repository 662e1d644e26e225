#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tumour {

/// Cell-average values on a grid, one entry per cell.
template <typename Scalar>
using FieldT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Interface values, n_cells + 1 entries; entry i is the face x_left + i*dx.
template <typename Scalar>
using FaceFieldT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Field = FieldT<double>;
using FaceField = FaceFieldT<double>;

/// Uniform cell-centred mesh over [x_left, x_right].
class Grid {
public:
    Grid(double x_left, double x_right, std::size_t n_cells)
        : x_left_(x_left), x_right_(x_right), n_cells_(n_cells) {
        if (!std::isfinite(x_left) || !std::isfinite(x_right))
            throw std::invalid_argument("grid bounds must be finite");
        if (!(x_left < x_right))
            throw std::invalid_argument("grid interval is empty: x_left must be < x_right");
        if (n_cells < 2)
            throw std::invalid_argument("grid needs at least 2 cells, got " + std::to_string(n_cells));
        dx_ = (x_right - x_left) / static_cast<double>(n_cells);
    }

    double x_left() const { return x_left_; }
    double x_right() const { return x_right_; }
    std::size_t size() const { return n_cells_; }
    Eigen::Index cells() const { return static_cast<Eigen::Index>(n_cells_); }
    double dx() const { return dx_; }

    double centre(Eigen::Index i) const { return x_left_ + (static_cast<double>(i) + 0.5) * dx_; }
    double face(Eigen::Index i) const { return x_left_ + static_cast<double>(i) * dx_; }

    Field centres() const {
        Field x(cells());
        for (Eigen::Index i = 0; i < cells(); ++i) x[i] = centre(i);
        return x;
    }

    Field zeros() const { return Field::Zero(cells()); }

    bool operator==(const Grid& other) const {
        return x_left_ == other.x_left_ && x_right_ == other.x_right_ && n_cells_ == other.n_cells_;
    }

private:
    double x_left_;
    double x_right_;
    std::size_t n_cells_;
    double dx_;
};

inline Grid make_grid(double x_left, double x_right, std::size_t n_cells) {
    return Grid(x_left, x_right, n_cells);
}

/// dx * sum(values), the cell-average quadrature used for every spatial integral.
template <typename Derived>
typename Derived::Scalar integrate(const Eigen::MatrixBase<Derived>& f, double dx) {
    return f.sum() * static_cast<typename Derived::Scalar>(dx);
}

/// Total variation sum_i |f_{i+1} - f_i|.
template <typename Derived>
typename Derived::Scalar total_variation(const Eigen::MatrixBase<Derived>& f) {
    const Eigen::Index n = f.size();
    if (n < 2) return typename Derived::Scalar(0);
    return (f.tail(n - 1) - f.head(n - 1)).cwiseAbs().sum();
}

}  // namespace tumour
