#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tumour/experiment.hpp"

using namespace tumour;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tumour_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> problems_of(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& key) {
    for (const auto& p : problems)
        if (p.rfind(key + ":", 0) == 0) return true;
    return false;
}

ExperimentConfig small(const std::string& base, const std::string& out) {
    ExperimentConfig c = preset(base);
    c.cells = 150;
    c.horizon = 0.2;
    c.snapshots = {0.0, 0.1, 0.2};
    c.output = out;
    return c;
}

}  // namespace

TEST(Presets, Fig1Upper) {
    const ExperimentConfig c = preset("fig1-upper");
    EXPECT_EQ(c.nu, 1.0);
    EXPECT_EQ(c.k, 100.0);
    EXPECT_EQ(c.horizon, 8.0);
    EXPECT_EQ(c.species1.support_left, 4.5);
    EXPECT_EQ(c.species1.support_right, 6.5);
    EXPECT_EQ(c.species2.support_left, 8.5);
    EXPECT_EQ(c.species2.support_right, 10.5);
    EXPECT_EQ(c.a1, 1.0);
    EXPECT_EQ(c.a2, 1.0);
}

TEST(Presets, OthersAndList) {
    EXPECT_EQ(preset("fig1-lower").nu, 0.01);
    EXPECT_EQ(preset("fig1-lower").horizon, 5.0);
    EXPECT_EQ(preset("fig2").a1, 2.0);
    EXPECT_EQ(preset("fig3").species2.support_left, 6.0);
    EXPECT_EQ(preset("fig3").effective_snapshots(), (std::vector<double>{0, 2, 4, 6}));
    EXPECT_EQ(preset_names().size(), 4u);
    EXPECT_THROW(preset("fig9"), ConfigError);
    for (const auto& name : preset_names()) EXPECT_TRUE(preset(name).problems().empty()) << name;
}

TEST(Config, RoundTripsThroughJson) {
    for (const auto& name : preset_names()) {
        const json j = to_json(preset(name));
        const ExperimentConfig back = config_from_json(j);
        EXPECT_EQ(to_json(back), j) << name;
    }
}

TEST(Config, KBelowTwoRejected) {
    const auto problems = problems_of({{"base", "fig1-upper"}, {"k", 1.5}});
    EXPECT_TRUE(mentions(problems, "k"));
}

TEST(Config, ReportsEveryProblemWithPath) {
    const json j = {{"nu", -1},
                    {"horizon", 1.0},
                    {"snapshots", {0.5, 0.2, 3.0}},
                    {"species1", {{"kind", "bump"}, {"left", 1}, {"right", 2}, {"colour", 1}}},
                    {"typo", true},
                    {"scheme", "spectral"}};
    const auto problems = problems_of(j);
    EXPECT_TRUE(mentions(problems, "k"));
    EXPECT_TRUE(mentions(problems, "species2"));
    EXPECT_TRUE(mentions(problems, "nu"));
    EXPECT_TRUE(mentions(problems, "typo"));
    EXPECT_TRUE(mentions(problems, "species1.colour"));
    EXPECT_TRUE(mentions(problems, "scheme"));
    EXPECT_TRUE(mentions(problems, "snapshots[1]"));
    EXPECT_TRUE(mentions(problems, "snapshots[2]"));
}

TEST(Config, TypeErrors) {
    const auto problems = problems_of({{"base", "fig2"}, {"cells", 1.5}, {"growth", "yes"}});
    EXPECT_TRUE(mentions(problems, "cells"));
    EXPECT_TRUE(mentions(problems, "growth"));
    EXPECT_TRUE(mentions(problems_of({{"base", "nope"}}), "base"));
}

TEST(Config, LoadFromFile) {
    const fs::path dir = scratch("load");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << R"({"base": "fig2", "cells": 300, "nu": 0.5})";
    const ExperimentConfig c = load_config(dir / "c.json");
    EXPECT_EQ(c.cells, 300u);
    EXPECT_EQ(c.nu, 0.5);
    EXPECT_EQ(c.a1, 2.0);
    EXPECT_EQ(c.base.value(), "fig2");
    std::ofstream(dir / "broken.json") << "{ not json";
    EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
    EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
    EXPECT_EQ(resolve_config("fig3").name, "fig3");
}

TEST(RunExperiment, WritesArtifacts) {
    const fs::path dir = scratch("artifacts");
    ExperimentConfig c = small("fig2", dir.string());
    c.scheme = SchemeChoice::both;
    const ExperimentOutcome out = run_experiment(c);
    ASSERT_EQ(out.status, 0) << out.error;
    EXPECT_FALSE(fs::exists(dir / "PARTIAL"));
    for (const char* scheme : {"fv", "pr"}) {
        for (const char* file : {"snapshot_000.csv", "snapshot_002.csv", "diagnostics.csv", "plot.gp"})
            EXPECT_TRUE(fs::exists(dir / scheme / file)) << scheme << "/" << file;
    }
    const std::string csv = slurp(dir / "fv" / "snapshot_002.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,n1,n2,n,p,W,r");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 151);
    const std::string gp = slurp(dir / "fv" / "plot.gp");
    EXPECT_NE(gp.find("dt 3"), std::string::npos);

    const json summary = json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["status"], "ok");
    EXPECT_EQ(summary["config"], to_json(c));
    EXPECT_TRUE(summary.contains("wall_time_s"));
    EXPECT_TRUE(summary["fv"]["budgets"].contains("residual_scaled"));
    EXPECT_TRUE(summary.contains("cross_check"));
}

TEST(RunExperiment, SeventeenDigitsRoundTrip) {
    const fs::path dir = scratch("digits");
    const ExperimentOutcome out = run_experiment(small("fig1-upper", dir.string()));
    std::ifstream in(dir / "fv" / "snapshot_002.csv");
    std::string line;
    std::getline(in, line);
    const Field& n1 = out.fv->snapshots.back().state.n1;
    for (Eigen::Index i = 0; std::getline(in, line); ++i) {
        std::stringstream row(line);
        std::string x, v;
        std::getline(row, x, ',');
        std::getline(row, v, ',');
        ASSERT_EQ(std::strtod(v.c_str(), nullptr), n1[i]);
    }
}

TEST(RunExperiment, Deterministic) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    run_experiment(small("fig3", a.string()));
    run_experiment(small("fig3", b.string()));
    for (const char* file : {"snapshot_001.csv", "snapshot_002.csv", "diagnostics.csv"})
        EXPECT_EQ(slurp(a / "fv" / file), slurp(b / "fv" / file)) << file;
}

TEST(RunExperiment, ZeroHorizon) {
    const fs::path dir = scratch("zero");
    ExperimentConfig c = small("fig1-upper", dir.string());
    c.horizon = 0.0;
    c.snapshots.clear();
    const ExperimentOutcome out = run_experiment(c);
    EXPECT_EQ(out.status, 0);
    EXPECT_EQ(out.summary["steps"], 0);
    EXPECT_TRUE(fs::exists(dir / "fv" / "snapshot_000.csv"));
    EXPECT_FALSE(fs::exists(dir / "fv" / "snapshot_001.csv"));
}

TEST(RunExperiment, SolverFailureLeavesMarker) {
    const fs::path dir = scratch("fail");
    ExperimentConfig c = small("fig1-upper", dir.string());
    // A coarse grid whose support spans one cell at huge density makes the
    // reaction overflow to infinity.
    c.species1 = InitialProfile::bump(4.5, 6.5, 1e30);
    const ExperimentOutcome out = run_experiment(c);
    EXPECT_EQ(out.status, 2);
    EXPECT_TRUE(fs::exists(dir / "PARTIAL"));
    EXPECT_EQ(json::parse(slurp(dir / "summary.json"))["status"], "failed");
}

TEST(RunExperiment, RejectsInvalidConfig) {
    ExperimentConfig c = preset("fig2");
    c.k = 1.0;
    EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Sweep, SingleKHasNoSlope) {
    const fs::path dir = scratch("sweep1");
    const SweepOutcome out = sweep_k(small("fig1-upper", dir.string()), {10});
    EXPECT_EQ(out.rows.size(), 1u);
    EXPECT_FALSE(out.slope.has_value());
    EXPECT_TRUE(fs::exists(dir / "sweep.csv"));
    EXPECT_TRUE(fs::exists(dir / "k_10" / "summary.json"));
}

TEST(Sweep, RowsOrderedAndThreaded) {
    const fs::path dir = scratch("sweep3");
    const SweepOutcome out = sweep_k(small("fig1-upper", dir.string()), {4, 8, 16}, 3);
    ASSERT_EQ(out.rows.size(), 3u);
    EXPECT_EQ(out.rows[0].k, 4);
    EXPECT_EQ(out.rows[2].k, 16);
    EXPECT_TRUE(out.slope.has_value());
    EXPECT_FALSE(out.partial);
    const json j = json::parse(slurp(dir / "sweep.json"));
    EXPECT_EQ(j["rows"].size(), 3u);
}

TEST(Sweep, RejectsBadK) {
    EXPECT_THROW(sweep_k(preset("fig1-upper"), {10, 1}), ConfigError);
    EXPECT_THROW(sweep_k(preset("fig1-upper"), {40, 10}), ConfigError);
}

TEST(Sweep, FailedMemberFlagsPartial) {
    const fs::path dir = scratch("sweepfail");
    ExperimentConfig c = small("fig1-upper", dir.string());
    c.species1 = InitialProfile::bump(4.5, 6.5, 1e30);
    const SweepOutcome out = sweep_k(c, {10, 20}, 1);
    EXPECT_TRUE(out.partial);
    EXPECT_EQ(out.status, 2);
    EXPECT_TRUE(fs::exists(dir / "PARTIAL"));
    EXPECT_TRUE(json::parse(slurp(dir / "sweep.json"))["partial"].get<bool>());
}

TEST(Slope, ExactPowerLaw) {
    const auto s = loglog_slope({10, 40, 160}, {1.0, 0.25, 0.0625});
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(*s, -1.0, 1e-12);
    EXPECT_FALSE(loglog_slope({10}, {1}).has_value());
}
