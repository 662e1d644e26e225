#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tumour {

/// Affine growth law G(p) = a - p. Decreasing with G_p = -1, vanishing at p = a.
struct GrowthLaw {
    double intercept = 1.0;

    static constexpr double slope = -1.0;
    static constexpr double alpha = 1.0;

    template <typename Scalar>
    Scalar operator()(Scalar p) const {
        return static_cast<Scalar>(intercept) - p;
    }

    /// The pressure at which this law stops growth.
    double zero() const { return intercept; }
};

struct ModelParams {
    double k = 100.0;
    double nu = 1.0;
    GrowthLaw g1{1.0};
    GrowthLaw g2{1.0};
    /// Homeostatic pressure p_M; the largest zero of the two growth laws.
    double p_max = 1.0;

    double max_intercept() const { return std::max(g1.intercept, g2.intercept); }

    void validate() const {
        if (!(std::isfinite(k) && k >= 2.0))
            throw std::invalid_argument("k must be >= 2, got " + std::to_string(k));
        if (!(std::isfinite(nu) && nu > 0.0))
            throw std::invalid_argument("nu must be > 0, got " + std::to_string(nu));
        if (!(std::isfinite(p_max) && p_max > 0.0))
            throw std::invalid_argument("p_max must be > 0, got " + std::to_string(p_max));
        if (!(std::isfinite(g1.intercept) && g1.intercept > 0.0) ||
            !(std::isfinite(g2.intercept) && g2.intercept > 0.0))
            throw std::invalid_argument("growth intercepts must be positive");
        // Both laws must stop growing at or below p_M.
        if (g1.intercept > p_max * (1.0 + 1e-12) || g2.intercept > p_max * (1.0 + 1e-12))
            throw std::invalid_argument("growth intercepts must not exceed p_max");
    }
};

/// Parameters with p_max set to the larger growth intercept.
inline ModelParams make_params(double k, double nu, double a1, double a2) {
    ModelParams params;
    params.k = k;
    params.nu = nu;
    params.g1 = GrowthLaw{a1};
    params.g2 = GrowthLaw{a2};
    params.p_max = std::max(a1, a2);
    params.validate();
    return params;
}

}  // namespace tumour
