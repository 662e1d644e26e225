#pragma once

// Semi-Lagrangian solver for the pressure / population-fraction form
//
//     p_t - p_x W_x = (k-1)/nu p Q,     Q = W - p + nu [r G1(p) + (1-r) G2(p)]
//     r_t - r_x W_x = r (1-r) [G1(p) - G2(p)]
//
// Both fields are carried along backward characteristics dX/ds = -W_x
// and then updated by their local ODEs.

#include <cstddef>
#include <vector>

#include "tumour/brinkman.hpp"
#include "tumour/diagnostics.hpp"
#include "tumour/fv_scheme.hpp"
#include "tumour/state.hpp"

namespace tumour {

/// Linear interpolation of face values at position x; zero beyond the grid.
double interpolate_faces(const FaceField& faces, const Grid& grid, double x);

/// Linear interpolation between cell centres. Beyond the last centre the
/// field blends towards its exterior value (0 for vacuum, the end value for extend).
double interpolate_cells(const Field& values, const Grid& grid, double x,
                         Exterior exterior = Exterior::vacuum);

/// Foot of the backward characteristic through x after one explicit Euler step.
double backward_foot(double x, const FaceField& face_velocity, const Grid& grid, double dt);

struct PROptions {
    double cfl = 0.45;
    double dt_max = 1e-2;
    Exterior exterior = Exterior::vacuum;
    /// The pressure exponent per step is bounded by 1/stiff_safety.
    double stiff_safety = 5.0;
};

/// min(dt_max, cfl dx / max|v|, nu / ((k-1) max|Q| stiff_safety)), Q over cells with p > 0.
double pr_stable_dt(const PRState& state, const Field& W, const FaceField& face_velocity,
                    const ModelParams& params, const PROptions& options);

/// One advect-then-react step of length dt.
PRState sl_step(const PRState& state, const ModelParams& params, double dt,
                const PROptions& options = {});

struct PRSnapshot {
    PRState state;
    Field W;
    DiagnosticsRecord diagnostics;
};

struct PRRunResult {
    std::vector<PRSnapshot> snapshots;
    std::vector<DiagnosticsRecord> series;
    std::vector<double> series_dt;
    Budgets budgets;
    std::size_t steps = 0;
};

PRRunResult pr_run(const PRState& initial, const ModelParams& params, double horizon,
                   const std::vector<double>& snapshot_times, const PROptions& options = {});

/// Raised when successive Picard differences stop shrinking.
class ContractionError : public SolverError {
public:
    using SolverError::SolverError;
};

struct PicardOptions {
    /// Time levels over the horizon.
    std::size_t time_steps = 50;
    Exterior exterior = Exterior::vacuum;
};

struct PicardResult {
    /// Iterate at time levels t_m = m * horizon / time_steps.
    std::vector<PRState> trajectory;
    /// Sup over space-time and both components of successive iterate differences.
    std::vector<double> errors;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Fixed-point iteration of the linearised (p, r) system: right-hand sides and
/// characteristics are frozen at the previous iterate and the new iterate is
/// obtained by integrating along backward characteristics from the initial data.
PicardResult picard_solve(const PRState& initial, const ModelParams& params, double horizon,
                          std::size_t max_iter, double tol, const PicardOptions& options = {});

}  // namespace tumour
