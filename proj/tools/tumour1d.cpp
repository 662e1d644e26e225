// tumour1d: run figure presets, config files and k-sweeps.
//
//   tumour1d simulate <config|preset> [--out DIR] [--scheme fv|pr|both] [--cells N] [--cfl X]
//   tumour1d sweep <config|preset> --k 10,40,160 [--out DIR] [--workers N]
//   tumour1d presets --list | --dump NAME
//
// Exit status: 0 ok, 1 invalid input, 2 solver failure.

#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "tumour/experiment.hpp"

using namespace tumour;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kSolverFailure = 2;

void report(const ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-dimensional two-species tumour growth simulator"};
    app.require_subcommand(1);

    std::string target;
    std::string out_dir;
    std::string scheme;
    std::size_t cells = 0;
    double cfl = 0.0;
    auto* simulate = app.add_subcommand("simulate", "Run one experiment");
    simulate->add_option("config", target, "Config file or preset name")->required();
    simulate->add_option("--out", out_dir, "Output directory");
    simulate->add_option("--scheme", scheme, "fv, pr or both")
        ->check(CLI::IsMember({"fv", "pr", "both"}));
    simulate->add_option("--cells", cells, "Number of cells")->check(CLI::PositiveNumber);
    simulate->add_option("--cfl", cfl, "CFL number in (0, 0.5]");

    std::vector<double> ks;
    std::size_t workers = 0;
    auto* sweep = app.add_subcommand("sweep", "Run the same experiment for several k");
    sweep->add_option("config", target, "Config file or preset name")->required();
    sweep->add_option("--k", ks, "Comma-separated k values")->required()->delimiter(',');
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--workers", workers, "Concurrent member runs");

    bool list = false;
    std::string dump;
    auto* presets_cmd = app.add_subcommand("presets", "List or print the built-in presets");
    auto* list_opt = presets_cmd->add_flag("--list", list, "Print preset names");
    auto* dump_opt = presets_cmd->add_option("--dump", dump, "Print a preset as JSON");
    list_opt->excludes(dump_opt);
    presets_cmd->require_option(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*presets_cmd) {
            if (list) {
                for (const auto& name : preset_names()) std::cout << name << "\n";
                return kOk;
            }
            std::cout << to_json(preset(dump)).dump(2) << "\n";
            return kOk;
        }

        ExperimentConfig config = resolve_config(target);
        if (!out_dir.empty()) config.output = out_dir;

        if (*simulate) {
            static const std::map<std::string, SchemeChoice> schemes = {
                {"fv", SchemeChoice::fv}, {"pr", SchemeChoice::pr}, {"both", SchemeChoice::both}};
            if (!scheme.empty()) config.scheme = schemes.at(scheme);
            if (cells) config.cells = cells;
            if (cfl != 0.0) config.cfl = cfl;
            if (auto problems = config.problems(); !problems.empty())
                throw ConfigError(std::move(problems));
            const ExperimentOutcome out = run_experiment(config);
            if (out.status != 0) {
                std::cerr << "solver failure: " << out.error << "\n"
                          << "partial output in " << out.directory.string() << "\n";
                return kSolverFailure;
            }
            std::cout << "wrote " << out.directory.string() << " (" << out.summary["steps"]
                      << " steps, " << out.summary["wall_time_s"].get<double>()
                      << " s)\n";
            return kOk;
        }

        const SweepOutcome out = sweep_k(config, ks, workers);
        std::printf("%10s %24s %24s %24s %24s\n", "k", "residual_raw", "residual_scaled",
                    "max_np_gap", "max_bv_n");
        for (const auto& r : out.rows)
            std::printf("%10g %24.17g %24.17g %24.17g %24.17g\n", r.k, r.residual_raw,
                        r.residual_scaled, r.max_np_gap, r.max_bv_n);
        if (out.slope) std::printf("log-log slope of residual_raw: %.17g\n", *out.slope);
        if (out.status != 0) {
            std::cerr << "sweep aborted (partial table): " << out.error << "\n";
            return kSolverFailure;
        }
        return kOk;
    } catch (const ConfigError& e) {
        report(e);
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverFailure;
    }
}
