#include "tumour/pr_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tumour {

double interpolate_faces(const FaceField& faces, const Grid& grid, double x) {
    const double s = (x - grid.x_left()) / grid.dx();
    const Eigen::Index last = faces.size() - 1;
    if (!(s >= 0.0) || s > static_cast<double>(last)) return 0.0;
    const auto i = std::min(static_cast<Eigen::Index>(std::floor(s)), last - 1);
    const double t = s - static_cast<double>(i);
    return (1.0 - t) * faces[i] + t * faces[i + 1];
}

double interpolate_cells(const Field& values, const Grid& grid, double x, Exterior exterior) {
    const Eigen::Index n = values.size();
    const double s = (x - grid.x_left()) / grid.dx() - 0.5;
    const double left_ghost = exterior == Exterior::extend ? values[0] : 0.0;
    const double right_ghost = exterior == Exterior::extend ? values[n - 1] : 0.0;
    if (s <= -1.0) return left_ghost;
    if (s >= static_cast<double>(n)) return right_ghost;
    if (s < 0.0) {
        const double t = s + 1.0;
        return (1.0 - t) * left_ghost + t * values[0];
    }
    if (s > static_cast<double>(n - 1)) {
        const double t = s - static_cast<double>(n - 1);
        return (1.0 - t) * values[n - 1] + t * right_ghost;
    }
    const auto i = std::min(static_cast<Eigen::Index>(std::floor(s)), n - 2);
    const double t = s - static_cast<double>(i);
    return (1.0 - t) * values[i] + t * values[i + 1];
}

double backward_foot(double x, const FaceField& face_velocity, const Grid& grid, double dt) {
    return x - dt * interpolate_faces(face_velocity, grid, x);
}

namespace {

double max_q_on_support(const PRState& state, const Field& W, const ModelParams& params) {
    const Field Q = q_residual(W, state.p, state.r, params);
    double q = 0.0;
    for (Eigen::Index i = 0; i < Q.size(); ++i)
        if (state.p[i] > 0.0) q = std::max(q, std::abs(Q[i]));
    return q;
}

Eigen::Array<bool, Eigen::Dynamic, 1> pressure_vacuum(const Field& p, double k) {
    const double floor = pressure_of(kVacuumFloor, k);
    return (p.array() <= floor);
}

void check_finite(const PRState& s, const char* where) {
    for (Eigen::Index i = 0; i < s.p.size(); ++i) {
        if (!std::isfinite(s.p[i]) || !std::isfinite(s.r[i])) {
            std::ostringstream msg;
            msg << where << ": non-finite value in cell " << i << " at t = " << s.time;
            throw SolverError(msg.str());
        }
    }
}

double fraction_rhs(double r, const ModelParams& params, double p) {
    return r * (1.0 - r) * (params.g1(p) - params.g2(p));
}

}  // namespace

double pr_stable_dt(const PRState& state, const Field& W, const FaceField& face_velocity,
                    const ModelParams& params, const PROptions& options) {
    double dt = cfl_dt(face_velocity, state.grid.dx(), options.cfl, options.dt_max);
    const double q = max_q_on_support(state, W, params);
    if (q > 0.0) dt = std::min(dt, params.nu / ((params.k - 1.0) * q * options.stiff_safety));
    return dt;
}

PRState sl_step(const PRState& state, const ModelParams& params, double dt,
                const PROptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument("sl_step needs dt > 0");
    const Grid& grid = state.grid;
    const Field W = convolve_kernel(state.p, grid, params.nu, options.exterior);
    const FaceField v = face_velocities(W, grid.dx());

    PRState out = state;
    const double growth_factor = (params.k - 1.0) / params.nu;
    for (Eigen::Index i = 0; i < grid.cells(); ++i) {
        const double foot = backward_foot(grid.centre(i), v, grid, dt);
        const double p = std::max(0.0, interpolate_cells(state.p, grid, foot, options.exterior));
        const double r =
            std::clamp(interpolate_cells(state.r, grid, foot, Exterior::extend), 0.0, 1.0);

        const double q =
            W[i] - p + params.nu * (r * params.g1(p) + (1.0 - r) * params.g2(p));
        out.p[i] = p * std::exp(growth_factor * q * dt);

        const double a = fraction_rhs(r, params, p);
        const double r_pred = std::clamp(r + dt * a, 0.0, 1.0);
        const double b = fraction_rhs(r_pred, params, p);
        out.r[i] = std::clamp(r + 0.5 * dt * (a + b), 0.0, 1.0);
    }
    out.time = state.time + dt;
    check_finite(out, "sl_step");
    fill_vacuum_fraction(out.r, pressure_vacuum(out.p, params.k));
    return out;
}

PRRunResult pr_run(const PRState& initial, const ModelParams& params, double horizon,
                   const std::vector<double>& snapshot_times, const PROptions& options) {
    params.validate();
    validate_snapshot_times(snapshot_times, horizon);
    PRRunResult result;
    PRState state = initial;
    state.time = 0.0;
    auto next_snapshot = snapshot_times.begin();

    while (true) {
        const Field W = convolve_kernel(state.p, state.grid, params.nu, options.exterior);
        const DiagnosticsRecord rec = record(state, params, W);
        while (next_snapshot != snapshot_times.end() && *next_snapshot <= state.time) {
            result.snapshots.push_back({state, W, rec});
            ++next_snapshot;
        }
        result.series.push_back(rec);
        if (state.time >= horizon) {
            result.series_dt.push_back(0.0);
            break;
        }
        double target = horizon;
        if (next_snapshot != snapshot_times.end()) target = std::min(target, *next_snapshot);
        const FaceField v = face_velocities(W, state.grid.dx());
        const double dt = std::min(pr_stable_dt(state, W, v, params, options), target - state.time);
        PRState next = sl_step(state, params, dt, options);
        if (dt >= target - state.time) next.time = target;
        result.series_dt.push_back(dt);
        ++result.steps;
        state = std::move(next);
    }
    result.budgets = budget_accumulate(result.series, result.series_dt, params.k);
    return result;
}

PicardResult picard_solve(const PRState& initial, const ModelParams& params, double horizon,
                          std::size_t max_iter, double tol, const PicardOptions& options) {
    params.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("Picard horizon must be positive");
    if (options.time_steps == 0) throw std::invalid_argument("Picard needs at least one time step");
    const Grid& grid = initial.grid;
    const std::size_t levels = options.time_steps;
    const double tau = horizon / static_cast<double>(levels);
    const double growth_factor = (params.k - 1.0) / params.nu;

    PicardResult result;
    std::vector<PRState> iterate;
    iterate.reserve(levels + 1);
    for (std::size_t m = 0; m <= levels; ++m) {
        PRState s = initial;
        s.time = static_cast<double>(m) * tau;
        iterate.push_back(std::move(s));
    }

    int growing = 0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        std::vector<PRState> next;
        next.reserve(levels + 1);
        next.push_back(iterate.front());
        double diff = 0.0;
        for (std::size_t m = 0; m < levels; ++m) {
            const PRState& frozen = iterate[m];
            const Field W = convolve_kernel(frozen.p, grid, params.nu, options.exterior);
            const FaceField v = face_velocities(W, grid.dx());
            const Field Q = q_residual(W, frozen.p, frozen.r, params);
            const Field rhs_p = growth_factor * (frozen.p.array() * Q.array()).matrix();
            Field rhs_r(grid.cells());
            for (Eigen::Index i = 0; i < grid.cells(); ++i)
                rhs_r[i] = fraction_rhs(frozen.r[i], params, frozen.p[i]);

            const PRState& prev = next.back();
            PRState u = prev;
            u.time = static_cast<double>(m + 1) * tau;
            for (Eigen::Index i = 0; i < grid.cells(); ++i) {
                const double foot = backward_foot(grid.centre(i), v, grid, tau);
                u.p[i] = interpolate_cells(prev.p, grid, foot, options.exterior) +
                         tau * interpolate_cells(rhs_p, grid, foot, options.exterior);
                u.r[i] = interpolate_cells(prev.r, grid, foot, Exterior::extend) +
                         tau * interpolate_cells(rhs_r, grid, foot, Exterior::extend);
            }
            check_finite(u, "picard_solve");
            diff = std::max({diff, (u.p - iterate[m + 1].p).cwiseAbs().maxCoeff(),
                             (u.r - iterate[m + 1].r).cwiseAbs().maxCoeff()});
            next.push_back(std::move(u));
        }
        iterate = std::move(next);
        result.errors.push_back(diff);
        result.iterations = it;

        if (diff <= tol) {
            result.converged = true;
            break;
        }
        const std::size_t e = result.errors.size();
        if (e >= 2 && result.errors[e - 1] >= result.errors[e - 2]) {
            if (++growing >= 3) {
                std::ostringstream msg;
                msg << "Picard iteration is not contracting over horizon " << horizon
                    << " (difference " << diff << " after " << it
                    << " iterations); use a smaller horizon";
                throw ContractionError(msg.str());
            }
        } else {
            growing = 0;
        }
    }
    result.trajectory = std::move(iterate);
    return result;
}

}  // namespace tumour
