#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tumour/grid.hpp"
#include "tumour/params.hpp"

namespace tumour {

/// Density below which a cell counts as vacuum and its fraction is undefined.
inline constexpr double kVacuumFloor = 1e-12;

/// p = k/(k-1) n^(k-1).
template <typename Scalar>
Scalar pressure_of(Scalar n, double k) {
    using std::pow;
    return static_cast<Scalar>(k / (k - 1.0)) * pow(n, static_cast<Scalar>(k - 1.0));
}

/// n = ((k-1)/k p)^(1/(k-1)).
template <typename Scalar>
Scalar density_of(Scalar p, double k) {
    using std::pow;
    return pow(static_cast<Scalar>((k - 1.0) / k) * p, static_cast<Scalar>(1.0 / (k - 1.0)));
}

template <typename Derived>
FieldT<typename Derived::Scalar> pressure(const Eigen::MatrixBase<Derived>& n_total, double k) {
    using Scalar = typename Derived::Scalar;
    if (!(k >= 2.0)) throw std::invalid_argument("pressure exponent k must be >= 2");
    FieldT<Scalar> p(n_total.size());
    for (Eigen::Index i = 0; i < n_total.size(); ++i) {
        if (n_total[i] < Scalar(0))
            throw std::domain_error("negative density " + std::to_string(double(n_total[i])) +
                                    " in cell " + std::to_string(i));
        p[i] = pressure_of(Scalar(n_total[i]), k);
    }
    return p;
}

template <typename Derived>
FieldT<typename Derived::Scalar> inverse_pressure(const Eigen::MatrixBase<Derived>& p, double k) {
    using Scalar = typename Derived::Scalar;
    if (!(k >= 2.0)) throw std::invalid_argument("pressure exponent k must be >= 2");
    FieldT<Scalar> n(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] < Scalar(0))
            throw std::domain_error("negative pressure " + std::to_string(double(p[i])) +
                                    " in cell " + std::to_string(i));
        n[i] = density_of(Scalar(p[i]), k);
    }
    return n;
}

template <typename Derived>
auto growth(const GrowthLaw& law, const Eigen::MatrixBase<Derived>& p) {
    using Scalar = typename Derived::Scalar;
    return (Scalar(law.intercept) - p.array()).matrix();
}

/// Population fraction n1/n with vacuum cells flagged.
template <typename Scalar>
struct FractionT {
    FieldT<Scalar> r;
    Eigen::Array<bool, Eigen::Dynamic, 1> vacuum;
};

using Fraction = FractionT<double>;

template <typename D1, typename D2>
FractionT<typename D1::Scalar> fraction(const Eigen::MatrixBase<D1>& n1,
                                        const Eigen::MatrixBase<D2>& n_total,
                                        double floor = kVacuumFloor) {
    using Scalar = typename D1::Scalar;
    const Eigen::Index n = n1.size();
    if (n_total.size() != n) throw std::invalid_argument("fraction: field sizes differ");
    FractionT<Scalar> out{FieldT<Scalar>::Zero(n), Eigen::Array<bool, Eigen::Dynamic, 1>(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (n1[i] > n_total[i] + Scalar(1e-12) * std::max(Scalar(1), Scalar(n_total[i])))
            throw std::domain_error("species density exceeds total density in cell " +
                                    std::to_string(i));
        const bool vac = n_total[i] < Scalar(floor);
        out.vacuum[i] = vac;
        if (!vac) out.r[i] = std::clamp(Scalar(n1[i] / n_total[i]), Scalar(0), Scalar(1));
    }
    return out;
}

/// Q = W - p + nu [r G1(p) + (1 - r) G2(p)].
template <typename DW, typename DP, typename DR>
FieldT<typename DW::Scalar> q_residual(const Eigen::MatrixBase<DW>& W,
                                       const Eigen::MatrixBase<DP>& p,
                                       const Eigen::MatrixBase<DR>& r,
                                       const ModelParams& params) {
    using Scalar = typename DW::Scalar;
    const auto g1 = Scalar(params.g1.intercept) - p.array();
    const auto g2 = Scalar(params.g2.intercept) - p.array();
    return (W.array() - p.array() +
            Scalar(params.nu) * (r.array() * g1 + (Scalar(1) - r.array()) * g2))
        .matrix();
}

}  // namespace tumour
