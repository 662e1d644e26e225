#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "tumour/experiment.hpp"

namespace tumour {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

json record_json(const DiagnosticsRecord& rec) {
    json j;
    const auto& cols = diagnostics_columns();
    const auto values = diagnostics_values(rec);
    for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = values[i];
    return j;
}

json budgets_json(const Budgets& b) {
    return {{"residual_raw", b.residual_raw},       {"residual_scaled", b.residual_scaled},
            {"n_dxp_integral", b.n_dxp_integral},   {"max_bv_n1", b.max_bv_n1},
            {"max_bv_n2", b.max_bv_n2},             {"max_bv_n", b.max_bv_n},
            {"max_bv_p", b.max_bv_p},               {"max_np_gap", b.max_np_gap},
            {"max_segregation", b.max_segregation}, {"max_pressure", b.max_pressure}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << format_number(values[i]);
    }
    out << '\n';
}

void write_snapshot(const fs::path& path, const SpeciesState& s, const Field& p, const Field& W,
                    const Field& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,n1,n2,n,p,W,r\n";
    for (Eigen::Index i = 0; i < s.grid.cells(); ++i)
        write_row(out, {s.grid.centre(i), s.n1[i], s.n2[i], s.n1[i] + s.n2[i], p[i], W[i], r[i]});
}

void write_diagnostics(const fs::path& path, const std::vector<DiagnosticsRecord>& series,
                       std::size_t every) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const auto& cols = diagnostics_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (std::size_t i = 0; i < series.size(); ++i)
        if (i % every == 0 || i + 1 == series.size()) write_row(out, diagnostics_values(series[i]));
}

std::string snapshot_name(std::size_t i) {
    char file[48];
    std::snprintf(file, sizeof file, "snapshot_%03zu.csv", i);
    return file;
}

// gnuplot: one panel per snapshot, species solid, pressure dotted.
std::string plot_script(const std::string& title, const std::vector<double>& times) {
    std::ostringstream gp;
    const std::size_t n = times.size();
    const std::size_t cols = n > 1 ? 2 : 1;
    const std::size_t rows = (n + cols - 1) / cols;
    gp << "# gnuplot plot.gp\n";
    gp << "set terminal pngcairo size " << 640 * cols << "," << 420 * rows << "\n";
    gp << "set output 'figure.png'\n";
    gp << "set datafile separator ','\n";
    gp << "set key top right\n";
    gp << "set xlabel 'x'\n";
    gp << "set multiplot layout " << rows << "," << cols << " title '" << title << "'\n";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string file = snapshot_name(i);
        gp << "set title 't = " << format_number(times[i]) << "'\n";
        gp << "plot '" << file << "' using 1:2 with lines lw 2 lc rgb 'red' title 'n1', \\\n"
           << "     '' using 1:3 with lines lw 2 lc rgb 'blue' title 'n2', \\\n"
           << "     '' using 1:5 with lines dt 3 lw 2 lc rgb 'black' title 'p'\n";
    }
    gp << "unset multiplot\n";
    return gp.str();
}

json write_fv(const fs::path& dir, const ExperimentConfig& c, const ModelParams& params,
              const RunResult& res) {
    fs::create_directories(dir);
    std::vector<double> times;
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
        const Snapshot& snap = res.snapshots[i];
        const Field n = snap.state.total();
        Fraction fr = fraction(snap.state.n1, n);
        fill_vacuum_fraction(fr.r, fr.vacuum);
        write_snapshot(dir / snapshot_name(i), snap.state, pressure(n, params.k), snap.W, fr.r);
        times.push_back(snap.state.time);
    }
    write_diagnostics(dir / "diagnostics.csv", res.series, c.diag_every);
    write_text(dir / "plot.gp", plot_script(c.name + " (fv)", times));
    return {{"steps", res.steps},
            {"snapshot_times", times},
            {"final", record_json(res.series.back())},
            {"budgets", budgets_json(res.budgets)},
            {"positivity_clips", res.clips.count},
            {"clip_magnitude", res.clips.magnitude},
            {"min_dt", res.steps ? res.min_dt : 0.0},
            {"max_cfl", res.max_cfl}};
}

json write_pr(const fs::path& dir, const ExperimentConfig& c, const ModelParams& params,
              const PRRunResult& res) {
    fs::create_directories(dir);
    std::vector<double> times;
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
        const PRSnapshot& snap = res.snapshots[i];
        const SpeciesState species = to_species(snap.state, params.k);
        write_snapshot(dir / snapshot_name(i), species, snap.state.p, snap.W, snap.state.r);
        times.push_back(snap.state.time);
    }
    write_diagnostics(dir / "diagnostics.csv", res.series, c.diag_every);
    write_text(dir / "plot.gp", plot_script(c.name + " (pr)", times));
    return {{"steps", res.steps},
            {"snapshot_times", times},
            {"final", record_json(res.series.back())},
            {"budgets", budgets_json(res.budgets)}};
}

}  // namespace

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) pts.emplace_back(std::log(x[i]), std::log(y[i]));
    if (pts.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (const auto& [a, b] : pts) {
        mx += a;
        my += b;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [a, b] : pts) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

ExperimentOutcome run_experiment(const ExperimentConfig& c) {
    if (auto problems = c.problems(); !problems.empty()) throw ConfigError(std::move(problems));
    const ModelParams params = model_params(c);
    const SpeciesState initial = initial_state(c);
    const std::vector<double> snapshots = c.effective_snapshots();

    ExperimentOutcome outcome;
    outcome.directory = c.output;
    fs::create_directories(outcome.directory);
    const fs::path marker = outcome.directory / "PARTIAL";
    write_text(marker, "run in progress\n");

    json summary;
    summary["config"] = to_json(c);
    const auto start = std::chrono::steady_clock::now();
    try {
        if (c.scheme != SchemeChoice::pr) {
            outcome.fv = run({initial, params, c.horizon, snapshots, scheme_options(c)});
            summary["fv"] = write_fv(outcome.directory / "fv", c, params, *outcome.fv);
        }
        if (c.scheme != SchemeChoice::fv) {
            outcome.pr = pr_run(to_pressure_fraction(initial, params.k), params, c.horizon,
                                snapshots, pr_options(c));
            summary["pr"] = write_pr(outcome.directory / "pr", c, params, *outcome.pr);
        }
        if (outcome.fv && outcome.pr) {
            const Field pf = pressure(outcome.fv->snapshots.back().state.total(), params.k);
            const Field& pp = outcome.pr->snapshots.back().state.p;
            const double dx = initial.grid.dx();
            summary["cross_check"] = {{"pressure_l1_difference", dx * (pf - pp).cwiseAbs().sum()},
                                      {"pressure_sup", std::max(pf.maxCoeff(), pp.maxCoeff())},
                                      {"dx", dx}};
        }
    } catch (const std::exception& e) {
        outcome.status = 2;
        outcome.error = e.what();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary["status"] = outcome.status == 0 ? "ok" : "failed";
    if (outcome.status) summary["error"] = outcome.error;
    summary["wall_time_s"] = wall;
    std::size_t steps = 0;
    if (outcome.fv) steps += outcome.fv->steps;
    if (outcome.pr) steps += outcome.pr->steps;
    summary["steps"] = steps;
    outcome.summary = summary;
    write_text(outcome.directory / "summary.json", summary.dump(2) + "\n");

    if (outcome.status == 0)
        fs::remove(marker);
    else
        write_text(marker, outcome.error + "\n");
    return outcome;
}

SweepOutcome sweep_k(const ExperimentConfig& base, const std::vector<double>& k_values,
                     std::size_t workers) {
    std::vector<std::string> problems;
    if (k_values.empty()) problems.push_back("k: need at least one value");
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        if (!(k_values[i] >= 2.0)) problems.push_back("k[" + std::to_string(i) + "]: must be >= 2");
        if (i && !(k_values[i] > k_values[i - 1]))
            problems.push_back("k[" + std::to_string(i) + "]: values must be strictly increasing");
    }
    for (auto& p : base.problems()) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(std::move(problems));

    if (workers == 0) workers = base.workers;
    workers = std::max<std::size_t>(1, std::min(workers, k_values.size()));

    const fs::path root = base.output;
    fs::create_directories(root);
    const fs::path marker = root / "PARTIAL";
    write_text(marker, "sweep in progress\n");

    std::vector<std::optional<SweepRow>> rows(k_values.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string first_error;

    auto worker = [&] {
        while (!failed) {
            const std::size_t i = next++;
            if (i >= k_values.size()) return;
            ExperimentConfig member = base;
            member.k = k_values[i];
            member.scheme = base.scheme == SchemeChoice::pr ? SchemeChoice::pr : SchemeChoice::fv;
            member.name = base.name + " k=" + format_number(k_values[i]);
            member.output = (root / ("k_" + format_number(k_values[i]))).string();
            ExperimentOutcome out;
            try {
                out = run_experiment(member);
            } catch (const std::exception& e) {
                out.status = 2;
                out.error = e.what();
            }
            if (out.status != 0) {
                std::lock_guard lock(error_mutex);
                if (first_error.empty())
                    first_error = "k = " + format_number(k_values[i]) + ": " + out.error;
                failed = true;
                return;
            }
            const Budgets& b = out.fv ? out.fv->budgets : out.pr->budgets;
            SweepRow row;
            row.k = k_values[i];
            row.residual_raw = b.residual_raw;
            row.residual_scaled = b.residual_scaled;
            row.max_np_gap = b.max_np_gap;
            row.max_bv_n1 = b.max_bv_n1;
            row.max_bv_n2 = b.max_bv_n2;
            row.max_bv_n = b.max_bv_n;
            row.max_bv_p = b.max_bv_p;
            row.max_segregation = b.max_segregation;
            row.max_pressure = b.max_pressure;
            row.steps = out.fv ? out.fv->steps : out.pr->steps;
            rows[i] = row;
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    SweepOutcome outcome;
    for (const auto& row : rows)
        if (row) outcome.rows.push_back(*row);
    outcome.partial = failed;
    if (failed) {
        outcome.status = 2;
        outcome.error = first_error;
    }
    std::vector<double> ks, raw;
    for (const auto& row : outcome.rows) {
        ks.push_back(row.k);
        raw.push_back(row.residual_raw);
    }
    outcome.slope = loglog_slope(ks, raw);

    std::ofstream csv(root / "sweep.csv", std::ios::binary);
    csv << "k,residual_raw,residual_scaled,max_np_gap,max_bv_n1,max_bv_n2,max_bv_n,max_bv_p,"
           "max_segregation,max_pressure,steps\n";
    json table = json::array();
    for (const auto& r : outcome.rows) {
        write_row(csv, {r.k, r.residual_raw, r.residual_scaled, r.max_np_gap, r.max_bv_n1,
                        r.max_bv_n2, r.max_bv_n, r.max_bv_p, r.max_segregation, r.max_pressure,
                        static_cast<double>(r.steps)});
        table.push_back({{"k", r.k},
                         {"residual_raw", r.residual_raw},
                         {"residual_scaled", r.residual_scaled},
                         {"max_np_gap", r.max_np_gap},
                         {"max_bv_n1", r.max_bv_n1},
                         {"max_bv_n2", r.max_bv_n2},
                         {"max_bv_n", r.max_bv_n},
                         {"max_bv_p", r.max_bv_p},
                         {"max_segregation", r.max_segregation},
                         {"max_pressure", r.max_pressure},
                         {"steps", r.steps}});
    }
    csv.close();
    json summary = {{"base", to_json(base)},
                    {"k_values", k_values},
                    {"rows", table},
                    {"slope", outcome.slope ? json(*outcome.slope) : json(nullptr)},
                    {"partial", outcome.partial},
                    {"workers", workers}};
    if (outcome.partial) summary["error"] = outcome.error;
    write_text(root / "sweep.json", summary.dump(2) + "\n");

    if (outcome.partial)
        write_text(marker, outcome.error + "\n");
    else
        fs::remove(marker);
    return outcome;
}

}  // namespace tumour
