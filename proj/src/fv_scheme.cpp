#include "tumour/fv_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tumour {

double cfl_dt(const FaceField& face_velocity, double dx, double cfl, double dt_max) {
    const double vmax = face_velocity.size() ? face_velocity.cwiseAbs().maxCoeff() : 0.0;
    if (vmax == 0.0) return dt_max;
    return std::min(dt_max, cfl * dx / vmax);
}

double pressure_stiff_dt(const Field& p, const ModelParams& params, double number) {
    const double pmax = p.size() ? p.maxCoeff() : 0.0;
    if (!(pmax > 0.0)) return std::numeric_limits<double>::infinity();
    return number * params.nu / ((params.k - 1.0) * pmax);
}

namespace {

void upwind_update(const Field& n, const FaceField& v, double ratio, Field& out, ClipAudit* audit) {
    const Eigen::Index cells = n.size();
    FaceField flux = FaceField::Zero(cells + 1);
    for (Eigen::Index f = 1; f < cells; ++f)
        flux[f] = v[f] >= 0.0 ? v[f] * n[f - 1] : v[f] * n[f];
    out = n - ratio * (flux.tail(cells) - flux.head(cells));
    for (Eigen::Index i = 0; i < cells; ++i) {
        if (out[i] < 0.0) {
            if (audit) audit->add(out[i]);
            out[i] = 0.0;
        }
    }
}

struct CellRhs {
    double d1;
    double d2;
};

CellRhs reaction_rhs(double n1, double n2, double p, const ModelParams& params) {
    return {n1 * params.g1(p), n2 * params.g2(p)};
}

CellRhs reaction_rhs(double n1, double n2, const ModelParams& params) {
    return reaction_rhs(n1, n2, pressure_of(n1 + n2, params.k), params);
}

}  // namespace

SpeciesState transport_step(const SpeciesState& state, const FaceField& face_velocity, double dt,
                            ClipAudit* audit) {
    const double dx = state.grid.dx();
    if (face_velocity.size() != state.grid.cells() + 1)
        throw std::invalid_argument("face velocity must have n_cells + 1 entries");
    if (!(dt >= 0.0)) throw std::invalid_argument("time step must be non-negative");
    const double vmax = face_velocity.cwiseAbs().maxCoeff();
    const double courant = dt * vmax / dx;
    if (courant > kMaxCfl * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "transport step refused: CFL number " << courant << " exceeds " << kMaxCfl;
        throw CflViolation(msg.str());
    }
    SpeciesState out = state;
    const double ratio = dt / dx;
    upwind_update(state.n1, face_velocity, ratio, out.n1, audit);
    upwind_update(state.n2, face_velocity, ratio, out.n2, audit);
    return out;
}

SpeciesState reaction_step(const SpeciesState& state, const ModelParams& params, double dt,
                           const SchemeOptions& options, ClipAudit* audit) {
    SpeciesState out = state;
    if (dt <= 0.0) return out;
    for (Eigen::Index i = 0; i < state.grid.cells(); ++i) {
        double n1 = state.n1[i];
        double n2 = state.n2[i];
        if (n1 < 0.0 || n2 < 0.0)
            throw std::domain_error("reaction step needs non-negative densities");
        if (n1 == 0.0 && n2 == 0.0) continue;

        const double p0 = pressure_of(n1 + n2, params.k);
        const double rate = std::max(std::abs(params.g1(p0)), std::abs(params.g2(p0))) +
                            (params.k - 1.0) * std::max(p0, params.p_max);
        const int substeps =
            std::max(1, static_cast<int>(std::ceil(dt * rate / options.reaction_stiffness)));
        const double h = dt / substeps;
        for (int s = 0; s < substeps; ++s) {
            const CellRhs a = s == 0 ? reaction_rhs(n1, n2, p0, params) : reaction_rhs(n1, n2, params);
            const double m1 = std::max(0.0, n1 + h * a.d1);
            const double m2 = std::max(0.0, n2 + h * a.d2);
            const CellRhs b = reaction_rhs(m1, m2, params);
            n1 += 0.5 * h * (a.d1 + b.d1);
            n2 += 0.5 * h * (a.d2 + b.d2);
            if (n1 < 0.0) {
                if (audit) audit->add(n1);
                n1 = 0.0;
            }
            if (n2 < 0.0) {
                if (audit) audit->add(n2);
                n2 = 0.0;
            }
        }
        out.n1[i] = n1;
        out.n2[i] = n2;
    }
    return out;
}

double step_dt_limit(const Field& p, const ModelParams& params, const SchemeOptions& options,
                     double dt_cap) {
    double limit = std::min({options.dt_max, dt_cap,
                             pressure_stiff_dt(p, params, options.pressure_stiffness)});
    if (options.splitting_accuracy > 0.0) {
        const double rate = (params.k - 1.0) * params.p_max;
        limit = std::min(limit, options.splitting_accuracy / (rate * rate));
    }
    return limit;
}

StepResult step(const SpeciesState& state, const ModelParams& params, const SchemeOptions& options,
                double dt_cap, const Field& p, BrinkmanSolution brinkman) {
    if (!(options.cfl > 0.0 && options.cfl <= kMaxCfl))
        throw std::invalid_argument("cfl must lie in (0, 0.5]");
    if (!(dt_cap > 0.0)) throw std::invalid_argument("step needs a positive time-step cap");

    if (!std::isfinite(p.maxCoeff())) {
        std::ostringstream msg;
        msg << "pressure is not finite at t = " << state.time;
        throw SolverError(msg.str());
    }
    const double limit = step_dt_limit(p, params, options, dt_cap);
    double dt = cfl_dt(brinkman.face_velocity, state.grid.dx(), options.cfl, limit);
    // Avoid leaving a sliver before the cap.
    if (dt < dt_cap && dt_cap < 2.0 * dt) dt = 0.5 * dt_cap;

    ClipAudit audit;
    SpeciesState moved = transport_step(state, brinkman.face_velocity, dt, &audit);
    SpeciesState reacted =
        options.growth ? reaction_step(moved, params, dt, options, &audit) : std::move(moved);
    reacted.time = state.time + dt;

    for (Eigen::Index i = 0; i < reacted.grid.cells(); ++i) {
        if (!std::isfinite(reacted.n1[i]) || !std::isfinite(reacted.n2[i])) {
            std::ostringstream msg;
            msg << "non-finite density in cell " << i << " after step at t = " << state.time;
            throw SolverError(msg.str());
        }
    }

    StepReport report;
    report.dt_used = dt;
    report.max_face_speed = brinkman.face_velocity.cwiseAbs().maxCoeff();
    report.positivity_clips = audit.count;
    report.clip_magnitude = audit.magnitude;
    report.cfl_number_used = dt * report.max_face_speed / state.grid.dx();
    return {std::move(reacted), report, std::move(brinkman.W)};
}

StepResult step(const SpeciesState& state, const ModelParams& params, const SchemeOptions& options,
                double dt_cap) {
    const Field p = pressure(state.total(), params.k);
    BrinkmanSolution brinkman = solve_convolution(p, state.grid, params.nu, options.exterior);
    return step(state, params, options, dt_cap, p, std::move(brinkman));
}

void validate_snapshot_times(const std::vector<double>& times, double horizon) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("horizon must be finite and non-negative");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0 && times[i] <= horizon))
            throw std::invalid_argument("snapshot time outside [0, horizon]");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("snapshot times must be strictly increasing");
    }
}

RunResult run(const RunRequest& request) {
    request.params.validate();
    validate_snapshot_times(request.snapshot_times, request.horizon);
    const double horizon = request.horizon;
    const ModelParams& params = request.params;
    const SchemeOptions& options = request.options;

    RunResult result;
    SpeciesState state = request.initial;
    state.time = 0.0;
    auto next_snapshot = request.snapshot_times.begin();

    while (true) {
        const Field p = pressure(state.total(), params.k);
        BrinkmanSolution brinkman = solve_convolution(p, state.grid, params.nu, options.exterior);
        const DiagnosticsRecord rec = record(state, params, p, brinkman.W);
        while (next_snapshot != request.snapshot_times.end() && *next_snapshot <= state.time) {
            result.snapshots.push_back({state, brinkman.W, rec});
            ++next_snapshot;
        }
        result.series.push_back(rec);
        if (state.time >= horizon) {
            result.series_dt.push_back(0.0);
            break;
        }

        double target = horizon;
        if (next_snapshot != request.snapshot_times.end()) target = std::min(target, *next_snapshot);
        const double cap = target - state.time;
        StepResult next = step(state, params, options, cap, p, std::move(brinkman));
        if (next.report.dt_used >= cap) next.state.time = target;

        result.series_dt.push_back(next.report.dt_used);
        result.clips += ClipAudit{next.report.positivity_clips, next.report.clip_magnitude};
        result.min_dt = std::min(result.min_dt, next.report.dt_used);
        result.max_cfl = std::max(result.max_cfl, next.report.cfl_number_used);
        ++result.steps;
        state = std::move(next.state);
    }
    result.budgets = budget_accumulate(result.series, result.series_dt, params.k);
    return result;
}

}  // namespace tumour
