#pragma once

#include <span>
#include <string>
#include <vector>

#include "tumour/brinkman.hpp"
#include "tumour/state.hpp"

namespace tumour {

/// Scalar observables of one state. Integrals use dx * sum.
struct DiagnosticsRecord {
    double time = 0.0;
    double mass1 = 0.0;
    double mass2 = 0.0;
    double mass_total = 0.0;
    double p_max = 0.0;
    /// dx * sum r(1 - r) over non-vacuum cells.
    double segregation = 0.0;
    double bv_n1 = 0.0;
    double bv_n2 = 0.0;
    double bv_n = 0.0;
    double bv_p = 0.0;
    /// dx * sum p |Q|.
    double comp_residual_l1 = 0.0;
    /// max p |1 - n|.
    double np_gap_max = 0.0;
    /// sum n_i |p_{i+1} - p_i|.
    double n_dxp_l1 = 0.0;
};

/// Column names in CSV order.
const std::vector<std::string>& diagnostics_columns();
std::vector<double> diagnostics_values(const DiagnosticsRecord& rec);

DiagnosticsRecord record(const SpeciesState& state, const ModelParams& params, const Field& W);
/// Same, reusing a pressure field already computed from the state.
DiagnosticsRecord record(const SpeciesState& state, const ModelParams& params, const Field& p,
                         const Field& W);
DiagnosticsRecord record(const PRState& state, const ModelParams& params, const Field& W);
/// Computes W by the convolution solver first.
DiagnosticsRecord record(const SpeciesState& state, const ModelParams& params);

/// Time-integrated quantities and running maxima over a run.
struct Budgets {
    /// sum dt * comp_residual_l1
    double residual_raw = 0.0;
    /// (k - 1) * residual_raw
    double residual_scaled = 0.0;
    /// sum dt * n_dxp_l1
    double n_dxp_integral = 0.0;
    double max_bv_n1 = 0.0;
    double max_bv_n2 = 0.0;
    double max_bv_n = 0.0;
    double max_bv_p = 0.0;
    double max_np_gap = 0.0;
    double max_segregation = 0.0;
    double max_pressure = 0.0;
};

/// records[i] is weighted by dt[i] (left-point rule over the step that starts there).
Budgets budget_accumulate(std::span<const DiagnosticsRecord> records, std::span<const double> dt,
                          double k);

}  // namespace tumour
