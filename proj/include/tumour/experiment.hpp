#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tumour/fv_scheme.hpp"
#include "tumour/initial.hpp"
#include "tumour/pr_scheme.hpp"

namespace tumour {

enum class SchemeChoice { fv, pr, both };

/// Everything a run needs. Plain data; validate() checks the invariants.
struct ExperimentConfig {
    std::string name = "custom";
    /// Preset this config was derived from, if any.
    std::optional<std::string> base;

    double x_left = 0.0;
    double x_right = 15.0;
    std::size_t cells = 1500;

    double k = 100.0;
    double nu = 1.0;
    double a1 = 1.0;
    double a2 = 1.0;
    /// Homeostatic pressure; max(a1, a2) when not given.
    std::optional<double> p_max;

    InitialProfile species1 = InitialProfile::bump(4.5, 6.5);
    InitialProfile species2 = InitialProfile::bump(8.5, 10.5);

    double horizon = 8.0;
    /// Defaults to {0, horizon}.
    std::vector<double> snapshots;

    SchemeChoice scheme = SchemeChoice::fv;
    double cfl = 0.45;
    double dt_max = 1e-2;
    Exterior exterior = Exterior::vacuum;
    bool growth = true;

    std::string output = "out";
    std::size_t workers = 1;
    /// Every n-th diagnostics record goes to the CSV. Budgets use all of them.
    std::size_t diag_every = 1;

    double effective_p_max() const { return p_max.value_or(std::max(a1, a2)); }
    std::vector<double> effective_snapshots() const;

    /// Every violated invariant, each prefixed with its key path.
    std::vector<std::string> problems() const;
};

/// Validation failure carrying every problem found.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string& name);
bool is_preset(const std::string& name);

/// Complete echo: every effective parameter, defaults included.
nlohmann::json to_json(const ExperimentConfig& config);
/// Parses and validates. A "base" key starts from that preset; otherwise
/// k, nu, horizon, species1 and species2 are required.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// A preset name or a config file path.
ExperimentConfig resolve_config(const std::string& name_or_path);

ModelParams model_params(const ExperimentConfig& config);
Grid make_grid(const ExperimentConfig& config);
SpeciesState initial_state(const ExperimentConfig& config);
SchemeOptions scheme_options(const ExperimentConfig& config);
PROptions pr_options(const ExperimentConfig& config);

struct ExperimentOutcome {
    /// 0 on success, 2 when a solver failed.
    int status = 0;
    std::string error;
    std::filesystem::path directory;
    std::optional<RunResult> fv;
    std::optional<PRRunResult> pr;
    nlohmann::json summary;
};

/// Runs the configured scheme(s) and writes into config.output:
///   <scheme>/snapshot_<i>.csv   x, n1, n2, n, p, W, r
///   <scheme>/diagnostics.csv
///   <scheme>/plot.gp
///   summary.json
/// A PARTIAL file is left behind when a solver fails.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

struct SweepRow {
    double k = 0.0;
    double residual_raw = 0.0;
    double residual_scaled = 0.0;
    double max_np_gap = 0.0;
    double max_bv_n1 = 0.0;
    double max_bv_n2 = 0.0;
    double max_bv_n = 0.0;
    double max_bv_p = 0.0;
    double max_segregation = 0.0;
    double max_pressure = 0.0;
    std::size_t steps = 0;
};

struct SweepOutcome {
    int status = 0;
    std::string error;
    bool partial = false;
    /// Completed members, ordered by k.
    std::vector<SweepRow> rows;
    /// Least-squares slope of log(residual_raw) against log(k); needs two rows.
    std::optional<double> slope;
};

/// Log-log least-squares slope, or nothing with fewer than two positive points.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// One member per k, each in <output>/k_<k>, run on up to `workers` threads
/// (0 uses base.workers). Writes sweep.csv and sweep.json into base.output.
SweepOutcome sweep_k(const ExperimentConfig& base, const std::vector<double>& k_values,
                     std::size_t workers = 0);

/// %.17g
std::string format_number(double value);

}  // namespace tumour
