#pragma once

// Screened elliptic solve  -nu W'' + W = p  on a uniform 1D grid.
//
// solve_convolution evaluates W = K * p exactly for piecewise-constant p with
// the free-space kernel K(x) = exp(-|x|/sqrt(nu)) / (2 sqrt(nu)). The kernel
// integral over cell j seen from centre i is
//
//     1 - exp(-a h / 2)              if i == j,
//     sinh(a h / 2) exp(-a |i-j| h)  otherwise,     a = 1/sqrt(nu),
//
// so W splits into a left-running and a right-running geometric prefix sum,
// each one recursive first-order filter pass over the grid.
//
// solve_tridiagonal discretises the operator with the three-point Laplacian
// and closes both ends with the free-space decay condition W' = -/+ a W.

#include <cmath>
#include <stdexcept>
#include <string>

#include "tumour/grid.hpp"

namespace tumour {

/// What the elliptic solve sees beyond the grid ends.
enum class Exterior {
    vacuum,  ///< p = 0 outside the grid
    extend,  ///< p continued by its boundary cell value
};

template <typename Scalar>
struct BrinkmanSolutionT {
    FieldT<Scalar> W;
    FaceFieldT<Scalar> face_velocity;
};

using BrinkmanSolution = BrinkmanSolutionT<double>;

namespace detail {

inline void check_viscosity(double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("Brinkman viscosity must be positive and finite, got " +
                                    std::to_string(nu));
}

}  // namespace detail

/// v_{i+1/2} = -(W_{i+1} - W_i)/dx on interior faces; the two boundary faces carry 0.
template <typename Derived>
FaceFieldT<typename Derived::Scalar> face_velocities(const Eigen::MatrixBase<Derived>& W,
                                                     double dx) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = W.size();
    FaceFieldT<Scalar> v = FaceFieldT<Scalar>::Zero(n + 1);
    if (n >= 2)
        v.segment(1, n - 1) = -(W.tail(n - 1) - W.head(n - 1)) / static_cast<Scalar>(dx);
    return v;
}

/// Cell-centre velocity, the mean of the two adjacent faces.
template <typename Derived>
FieldT<typename Derived::Scalar> centre_velocities(const Eigen::MatrixBase<Derived>& faces) {
    const Eigen::Index n = faces.size() - 1;
    return (faces.head(n) + faces.tail(n)) / typename Derived::Scalar(2);
}

/// W = K * p by two O(N) exponential recursions. Production path.
template <typename Derived>
FieldT<typename Derived::Scalar> convolve_kernel(const Eigen::MatrixBase<Derived>& p,
                                                 const Grid& grid, double nu,
                                                 Exterior exterior = Exterior::vacuum) {
    using Scalar = typename Derived::Scalar;
    using std::exp;
    using std::expm1;
    using std::sinh;
    using std::sqrt;
    detail::check_viscosity(nu);
    const Eigen::Index n = p.size();
    if (n != grid.cells()) throw std::invalid_argument("pressure does not match the grid");

    const Scalar ah = static_cast<Scalar>(grid.dx()) / sqrt(static_cast<Scalar>(nu));
    const Scalar decay = exp(-ah);
    const Scalar self = -expm1(-ah / Scalar(2));
    const Scalar neighbour = sinh(ah / Scalar(2));
    // sum_{m >= 1} decay^m
    const Scalar tail = decay / (-expm1(-ah));

    FieldT<Scalar> left(n);
    FieldT<Scalar> right(n);
    left[0] = exterior == Exterior::extend ? p[0] * tail : Scalar(0);
    for (Eigen::Index i = 1; i < n; ++i) left[i] = decay * (left[i - 1] + p[i - 1]);
    right[n - 1] = exterior == Exterior::extend ? p[n - 1] * tail : Scalar(0);
    for (Eigen::Index i = n - 2; i >= 0; --i) right[i] = decay * (right[i + 1] + p[i + 1]);

    return self * p + neighbour * (left + right);
}

/// Three-point finite-difference solve of (I - nu D2) W = p by Thomas elimination.
template <typename Derived>
FieldT<typename Derived::Scalar> tridiagonal_potential(const Eigen::MatrixBase<Derived>& p,
                                                       const Grid& grid, double nu,
                                                       Exterior exterior = Exterior::vacuum) {
    using Scalar = typename Derived::Scalar;
    using std::sqrt;
    detail::check_viscosity(nu);
    const Eigen::Index n = p.size();
    if (n != grid.cells()) throw std::invalid_argument("pressure does not match the grid");

    const Scalar h = static_cast<Scalar>(grid.dx());
    const Scalar beta = static_cast<Scalar>(nu) / (h * h);
    const Scalar ah = h / sqrt(static_cast<Scalar>(nu));
    // Ghost value from the centred Robin condition at the end face:
    //   W_ghost - W_far = ghost_ratio * (W_edge - W_far).
    const Scalar ghost_ratio = (Scalar(1) - ah / Scalar(2)) / (Scalar(1) + ah / Scalar(2));

    FieldT<Scalar> lower = FieldT<Scalar>::Constant(n, -beta);
    FieldT<Scalar> diag = FieldT<Scalar>::Constant(n, Scalar(1) + Scalar(2) * beta);
    FieldT<Scalar> upper = FieldT<Scalar>::Constant(n, -beta);
    FieldT<Scalar> rhs = p;
    diag[0] -= beta * ghost_ratio;
    diag[n - 1] -= beta * ghost_ratio;
    if (exterior == Exterior::extend) {
        rhs[0] += beta * (Scalar(1) - ghost_ratio) * p[0];
        rhs[n - 1] += beta * (Scalar(1) - ghost_ratio) * p[n - 1];
    }

    // Forward elimination.
    FieldT<Scalar> c_prime(n);
    FieldT<Scalar> d_prime(n);
    c_prime[0] = upper[0] / diag[0];
    d_prime[0] = rhs[0] / diag[0];
    for (Eigen::Index i = 1; i < n; ++i) {
        const Scalar m = diag[i] - lower[i] * c_prime[i - 1];
        c_prime[i] = upper[i] / m;
        d_prime[i] = (rhs[i] - lower[i] * d_prime[i - 1]) / m;
    }
    FieldT<Scalar> W(n);
    W[n - 1] = d_prime[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) W[i] = d_prime[i] - c_prime[i] * W[i + 1];
    return W;
}

template <typename Derived>
BrinkmanSolutionT<typename Derived::Scalar> solve_convolution(
    const Eigen::MatrixBase<Derived>& p, const Grid& grid, double nu,
    Exterior exterior = Exterior::vacuum) {
    BrinkmanSolutionT<typename Derived::Scalar> out;
    out.W = convolve_kernel(p, grid, nu, exterior);
    out.face_velocity = face_velocities(out.W, grid.dx());
    return out;
}

template <typename Derived>
BrinkmanSolutionT<typename Derived::Scalar> solve_tridiagonal(
    const Eigen::MatrixBase<Derived>& p, const Grid& grid, double nu,
    Exterior exterior = Exterior::vacuum) {
    BrinkmanSolutionT<typename Derived::Scalar> out;
    out.W = tridiagonal_potential(p, grid, nu, exterior);
    out.face_velocity = face_velocities(out.W, grid.dx());
    return out;
}

}  // namespace tumour
