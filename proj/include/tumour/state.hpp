#pragma once

#include <limits>
#include <stdexcept>
#include <utility>

#include "tumour/constitutive.hpp"
#include "tumour/grid.hpp"
#include "tumour/params.hpp"

namespace tumour {

/// Both species densities at one time level.
struct SpeciesState {
    Grid grid;
    Field n1;
    Field n2;
    double time = 0.0;

    SpeciesState(Grid g, Field first, Field second, double t = 0.0)
        : grid(g), n1(std::move(first)), n2(std::move(second)), time(t) {
        if (n1.size() != grid.cells() || n2.size() != grid.cells())
            throw std::invalid_argument("species fields do not match the grid");
    }

    static SpeciesState zero(const Grid& g) { return SpeciesState(g, g.zeros(), g.zeros()); }

    Field total() const { return n1 + n2; }
};

/// Pressure and population fraction at one time level.
struct PRState {
    Grid grid;
    Field p;
    Field r;
    double time = 0.0;

    PRState(Grid g, Field pressure_field, Field fraction_field, double t = 0.0)
        : grid(g), p(std::move(pressure_field)), r(std::move(fraction_field)), time(t) {
        if (p.size() != grid.cells() || r.size() != grid.cells())
            throw std::invalid_argument("pressure/fraction fields do not match the grid");
    }
};

/// Copies the nearest non-vacuum fraction value into vacuum cells (ties go left).
/// A grid that is entirely vacuum is left unchanged.
inline void fill_vacuum_fraction(Field& r, const Eigen::Array<bool, Eigen::Dynamic, 1>& vacuum) {
    const Eigen::Index n = r.size();
    Eigen::VectorXi nearest = Eigen::VectorXi::Constant(n, -1);
    Eigen::VectorXi dist = Eigen::VectorXi::Constant(n, std::numeric_limits<int>::max());
    int last = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!vacuum[i]) last = static_cast<int>(i);
        if (last >= 0) {
            nearest[i] = last;
            dist[i] = static_cast<int>(i) - last;
        }
    }
    last = -1;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (!vacuum[i]) last = static_cast<int>(i);
        if (last >= 0 && last - static_cast<int>(i) < dist[i]) {
            nearest[i] = last;
            dist[i] = last - static_cast<int>(i);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (vacuum[i] && nearest[i] >= 0) r[i] = r[nearest[i]];
}

/// (n1, n2) -> (p, r); vacuum fractions are filled from the nearest occupied cell.
inline PRState to_pressure_fraction(const SpeciesState& s, double k) {
    const Field n = s.total();
    Fraction fr = fraction(s.n1, n);
    fill_vacuum_fraction(fr.r, fr.vacuum);
    return PRState(s.grid, pressure(n, k), std::move(fr.r), s.time);
}

/// (p, r) -> (n1, n2) with n = inverse_pressure(p).
inline SpeciesState to_species(const PRState& s, double k) {
    const Field n = inverse_pressure(s.p, k);
    Field n1 = (n.array() * s.r.array()).matrix();
    Field n2 = (n.array() * (1.0 - s.r.array())).matrix();
    return SpeciesState(s.grid, std::move(n1), std::move(n2), s.time);
}

}  // namespace tumour
