#include "tumour/initial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tumour {

namespace {

// Antiderivative of s*(w - s), anchored at s = 0.
double bump_antiderivative(double s, double w) {
    s = std::clamp(s, 0.0, w);
    return s * s * (0.5 * w - s / 3.0);
}

Field bump_cell_averages(const InitialProfile& profile, const Grid& grid) {
    const double a = profile.support_left;
    const double w = profile.support_right - a;
    const double dx = grid.dx();
    Field values(grid.cells());
    for (Eigen::Index i = 0; i < grid.cells(); ++i) {
        const double lo = grid.face(i) - a;
        const double hi = grid.face(i + 1) - a;
        values[i] = (bump_antiderivative(hi, w) - bump_antiderivative(lo, w)) / dx;
    }
    return values;
}

double table_value(const std::vector<std::pair<double, double>>& table, double x) {
    if (x < table.front().first || x > table.back().first) return 0.0;
    auto it = std::lower_bound(table.begin(), table.end(), x,
                               [](const auto& pt, double v) { return pt.first < v; });
    if (it == table.begin()) return it->second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    if (x1 == x0) return y1;
    const double t = (x - x0) / (x1 - x0);
    return y0 + t * (y1 - y0);
}

}  // namespace

Field build_initial(const InitialProfile& profile, const Grid& grid) {
    double left = profile.support_left;
    double right = profile.support_right;
    if (profile.kind == ProfileKind::custom_table) {
        if (profile.table.size() < 2)
            throw std::invalid_argument("custom table needs at least two points");
        if (!std::is_sorted(profile.table.begin(), profile.table.end(),
                            [](const auto& l, const auto& r) { return l.first < r.first; }))
            throw std::invalid_argument("custom table abscissae must be sorted");
        for (const auto& [x, y] : profile.table)
            if (!std::isfinite(x) || !std::isfinite(y) || y < 0.0)
                throw std::invalid_argument("custom table values must be finite and non-negative");
        left = profile.table.front().first;
        right = profile.table.back().first;
    }
    if (!(left < right))
        throw std::invalid_argument("profile support is empty");
    if (left < grid.x_left() || right > grid.x_right())
        throw std::invalid_argument("profile support [" + std::to_string(left) + ", " +
                                    std::to_string(right) + "] lies outside the grid");

    Field values;
    if (profile.kind == ProfileKind::parabolic_bump) {
        values = bump_cell_averages(profile, grid);
    } else {
        values.resize(grid.cells());
        for (Eigen::Index i = 0; i < grid.cells(); ++i)
            values[i] = table_value(profile.table, grid.centre(i));
    }

    if (profile.normalize_mass_to) {
        const double target = *profile.normalize_mass_to;
        if (!(target > 0.0) || !std::isfinite(target))
            throw std::invalid_argument("target mass must be positive");
        const double raw = integrate(values, grid.dx());
        if (!(raw > 0.0))
            throw std::invalid_argument("profile has zero mass on this grid");
        values *= target / raw;
    } else {
        if (!(profile.amplitude >= 0.0) || !std::isfinite(profile.amplitude))
            throw std::invalid_argument("profile amplitude must be non-negative");
        values *= profile.amplitude;
        if (!(values.sum() > 0.0))
            throw std::invalid_argument("profile has zero mass on this grid");
    }
    return values;
}

}  // namespace tumour
