#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tumour/brinkman.hpp"
#include "tumour/diagnostics.hpp"
#include "tumour/state.hpp"

namespace tumour {

/// Raised when a transport step is requested with a time step above the CFL bound.
class CflViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a scheme produces non-finite values or otherwise cannot continue.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest CFL number for which upwind transport stays positivity preserving.
inline constexpr double kMaxCfl = 0.5;

struct SchemeOptions {
    double cfl = 0.45;
    double dt_max = 1e-2;
    Exterior exterior = Exterior::vacuum;
    /// Reaction substeps satisfy h * (|G| + (k-1) p) <= this bound, cell by cell.
    double reaction_stiffness = 0.5;
    /// dt * (k-1) max p / nu is kept below this bound; the explicit velocity
    /// relaxes pressure perturbations at rate up to (k-1) p / nu.
    double pressure_stiffness = 0.5;
    /// dt * ((k-1) p_M)^2 is kept below this bound so the transport/reaction
    /// splitting error stays small against the O(1/k) complementarity residual.
    /// Zero disables the bound.
    double splitting_accuracy = 1.0;
    /// false runs pure transport (G = 0 for both species).
    bool growth = true;
};

/// Negative values removed by clamping.
struct ClipAudit {
    std::size_t count = 0;
    double magnitude = 0.0;

    void add(double value) {
        ++count;
        magnitude += -value;
    }
    ClipAudit& operator+=(const ClipAudit& o) {
        count += o.count;
        magnitude += o.magnitude;
        return *this;
    }
};

struct StepReport {
    double dt_used = 0.0;
    double max_face_speed = 0.0;
    std::size_t positivity_clips = 0;
    double clip_magnitude = 0.0;
    double cfl_number_used = 0.0;
};

/// min(dt_max, cfl dx / max|v|), or dt_max when the velocity vanishes.
double cfl_dt(const FaceField& face_velocity, double dx, double cfl, double dt_max);

/// number * nu / ((k-1) max p), infinite for a pressure-free state.
double pressure_stiff_dt(const Field& p, const ModelParams& params, double number);

/// Upper bound on dt from dt_max, the cap, and both stiffness rules.
double step_dt_limit(const Field& p, const ModelParams& params, const SchemeOptions& options,
                     double dt_cap);

/// Conservative donor-cell update of both species; zero flux through the grid ends.
SpeciesState transport_step(const SpeciesState& state, const FaceField& face_velocity, double dt,
                            ClipAudit* audit = nullptr);

/// Per-cell Heun integration of dn_i/dt = n_i G_i(p(n1 + n2)).
SpeciesState reaction_step(const SpeciesState& state, const ModelParams& params, double dt,
                           const SchemeOptions& options = {}, ClipAudit* audit = nullptr);

struct StepResult {
    SpeciesState state;
    StepReport report;
    /// Potential and pressure of the state the step started from.
    Field W;
};

/// Brinkman solve, then transport, then reaction. dt never exceeds dt_cap.
StepResult step(const SpeciesState& state, const ModelParams& params,
                const SchemeOptions& options = {},
                double dt_cap = std::numeric_limits<double>::infinity());

/// step() with the pressure and Brinkman solution of `state` supplied by the caller.
StepResult step(const SpeciesState& state, const ModelParams& params, const SchemeOptions& options,
                double dt_cap, const Field& p, BrinkmanSolution brinkman);

struct Snapshot {
    SpeciesState state;
    Field W;
    DiagnosticsRecord diagnostics;
};

/// What to simulate: initial state, horizon and the times to keep.
struct RunRequest {
    SpeciesState initial;
    ModelParams params;
    double horizon = 0.0;
    std::vector<double> snapshot_times;
    SchemeOptions options;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    /// One record at the start of every step and one at the final time.
    std::vector<DiagnosticsRecord> series;
    /// series[i] weight; the final record carries 0.
    std::vector<double> series_dt;
    Budgets budgets;
    std::size_t steps = 0;
    ClipAudit clips;
    double min_dt = std::numeric_limits<double>::infinity();
    double max_cfl = 0.0;
};

/// Steps to the horizon, shortening dt to land on every snapshot time.
RunResult run(const RunRequest& request);

/// Throws std::invalid_argument unless times are sorted, distinct and inside [0, horizon].
void validate_snapshot_times(const std::vector<double>& times, double horizon);

}  // namespace tumour
