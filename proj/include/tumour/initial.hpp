#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tumour/grid.hpp"

namespace tumour {

enum class ProfileKind { parabolic_bump, custom_table };

/// Initial density of one species.
///
/// A parabolic bump is amplitude*(x - x_a)(x_b - x) on [x_a, x_b] and zero
/// elsewhere. A custom table is the piecewise-linear interpolant of `table`
/// (sorted by x), zero outside its first and last abscissa. When
/// `normalize_mass_to` is set the amplitude is rescaled so that the discrete
/// mass dx*sum equals it.
struct InitialProfile {
    ProfileKind kind = ProfileKind::parabolic_bump;
    double support_left = 0.0;
    double support_right = 1.0;
    std::optional<double> normalize_mass_to = 1.0;
    double amplitude = 1.0;
    std::vector<std::pair<double, double>> table;

    static InitialProfile bump(double left, double right, std::optional<double> mass = 1.0,
                               double amplitude = 1.0) {
        InitialProfile p;
        p.kind = ProfileKind::parabolic_bump;
        p.support_left = left;
        p.support_right = right;
        p.normalize_mass_to = mass;
        p.amplitude = amplitude;
        return p;
    }
};

/// Cell averages of the profile on `grid`. Throws std::invalid_argument when
/// the support leaves the grid, the raw mass is zero, or the target mass is
/// not positive.
Field build_initial(const InitialProfile& profile, const Grid& grid);

}  // namespace tumour
