#include "tumour/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tumour {

namespace {

DiagnosticsRecord from_fields(const Grid& grid, double time, const Field& n1, const Field& n2,
                              const Field& p, const Field& W, const ModelParams& params) {
    if (W.size() != grid.cells()) throw std::invalid_argument("potential does not match the grid");
    const double dx = grid.dx();
    const Field n = n1 + n2;
    const Fraction fr = fraction(n1, n);

    DiagnosticsRecord rec;
    rec.time = time;
    rec.mass1 = integrate(n1, dx);
    rec.mass2 = integrate(n2, dx);
    rec.mass_total = integrate(n, dx);
    rec.p_max = p.maxCoeff();

    double mixing = 0.0;
    for (Eigen::Index i = 0; i < n.size(); ++i)
        if (!fr.vacuum[i]) mixing += fr.r[i] * (1.0 - fr.r[i]);
    rec.segregation = dx * mixing;

    rec.bv_n1 = total_variation(n1);
    rec.bv_n2 = total_variation(n2);
    rec.bv_n = total_variation(n);
    rec.bv_p = total_variation(p);

    const Field Q = q_residual(W, p, fr.r, params);
    rec.comp_residual_l1 = dx * (p.array() * Q.array().abs()).sum();
    rec.np_gap_max = (p.array() * (1.0 - n.array()).abs()).maxCoeff();

    const Eigen::Index m = n.size();
    rec.n_dxp_l1 = (n.head(m - 1).array() * (p.tail(m - 1) - p.head(m - 1)).array().abs()).sum();
    return rec;
}

}  // namespace

const std::vector<std::string>& diagnostics_columns() {
    static const std::vector<std::string> cols = {
        "time",  "mass1", "mass2", "mass_total",       "p_max",      "segregation", "bv_n1",
        "bv_n2", "bv_n",  "bv_p",  "comp_residual_l1", "np_gap_max", "n_dxp_l1"};
    return cols;
}

std::vector<double> diagnostics_values(const DiagnosticsRecord& r) {
    return {r.time,  r.mass1, r.mass2, r.mass_total,       r.p_max,      r.segregation, r.bv_n1,
            r.bv_n2, r.bv_n,  r.bv_p,  r.comp_residual_l1, r.np_gap_max, r.n_dxp_l1};
}

DiagnosticsRecord record(const SpeciesState& state, const ModelParams& params, const Field& W) {
    const Field p = pressure(state.total(), params.k);
    return from_fields(state.grid, state.time, state.n1, state.n2, p, W, params);
}

DiagnosticsRecord record(const SpeciesState& state, const ModelParams& params, const Field& p,
                         const Field& W) {
    return from_fields(state.grid, state.time, state.n1, state.n2, p, W, params);
}

DiagnosticsRecord record(const PRState& state, const ModelParams& params, const Field& W) {
    const SpeciesState species = to_species(state, params.k);
    return from_fields(state.grid, state.time, species.n1, species.n2, state.p, W, params);
}

DiagnosticsRecord record(const SpeciesState& state, const ModelParams& params) {
    const Field p = pressure(state.total(), params.k);
    const Field W = convolve_kernel(p, state.grid, params.nu);
    return from_fields(state.grid, state.time, state.n1, state.n2, p, W, params);
}

Budgets budget_accumulate(std::span<const DiagnosticsRecord> records, std::span<const double> dt,
                          double k) {
    if (records.size() != dt.size())
        throw std::invalid_argument("budget_accumulate: one dt per record required");
    Budgets b;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        b.residual_raw += dt[i] * r.comp_residual_l1;
        b.n_dxp_integral += dt[i] * r.n_dxp_l1;
        b.max_bv_n1 = std::max(b.max_bv_n1, r.bv_n1);
        b.max_bv_n2 = std::max(b.max_bv_n2, r.bv_n2);
        b.max_bv_n = std::max(b.max_bv_n, r.bv_n);
        b.max_bv_p = std::max(b.max_bv_p, r.bv_p);
        b.max_np_gap = std::max(b.max_np_gap, r.np_gap_max);
        b.max_segregation = std::max(b.max_segregation, r.segregation);
        b.max_pressure = std::max(b.max_pressure, r.p_max);
    }
    b.residual_scaled = (k - 1.0) * b.residual_raw;
    return b;
}

}  // namespace tumour
