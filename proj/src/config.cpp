#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tumour/experiment.hpp"

namespace tumour {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += "; ";
        out += s;
    }
    return out;
}

const char* scheme_name(SchemeChoice s) {
    switch (s) {
        case SchemeChoice::fv: return "fv";
        case SchemeChoice::pr: return "pr";
        case SchemeChoice::both: return "both";
    }
    return "fv";
}

const char* exterior_name(Exterior e) { return e == Exterior::extend ? "extend" : "vacuum"; }

json profile_json(const InitialProfile& p) {
    json j;
    if (p.kind == ProfileKind::parabolic_bump) {
        j["kind"] = "bump";
        j["left"] = p.support_left;
        j["right"] = p.support_right;
        j["amplitude"] = p.amplitude;
    } else {
        j["kind"] = "table";
        json pts = json::array();
        for (const auto& [x, y] : p.table) pts.push_back({x, y});
        j["points"] = pts;
    }
    j["mass"] = p.normalize_mass_to ? json(*p.normalize_mass_to) : json(nullptr);
    return j;
}

// Reads keys of one JSON object, recording every problem instead of stopping.
class Reader {
public:
    Reader(const json& obj, std::string prefix, std::vector<std::string>& errors)
        : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

    bool has(const std::string& key) const { return obj_.contains(key); }

    void number(const std::string& key, double& out) {
        if (!touch(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number()) return fail(key, "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(key, "must be finite");
    }

    void optional_number(const std::string& key, std::optional<double>& out) {
        if (!touch(key)) return;
        const json& v = obj_.at(key);
        if (v.is_null()) {
            out.reset();
            return;
        }
        double value = 0.0;
        number_value(key, v, value);
        out = value;
    }

    void count(const std::string& key, std::size_t& out) {
        if (!touch(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            return fail(key, "expected a non-negative integer");
        out = v.get<std::size_t>();
    }

    void text(const std::string& key, std::string& out) {
        if (!touch(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_string()) return fail(key, "expected a string");
        out = v.get<std::string>();
    }

    void boolean(const std::string& key, bool& out) {
        if (!touch(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_boolean()) return fail(key, "expected true or false");
        out = v.get<bool>();
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (!touch(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_array()) return fail(key, "expected an array of numbers");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            double value = 0.0;
            number_value(key + "[" + std::to_string(i) + "]", v[i], value);
            out.push_back(value);
        }
    }

    template <typename Enum>
    void choice(const std::string& key, const std::map<std::string, Enum>& options, Enum& out) {
        if (!touch(key)) return;
        const json& v = obj_.at(key);
        if (v.is_string()) {
            const auto it = options.find(v.get<std::string>());
            if (it != options.end()) {
                out = it->second;
                return;
            }
        }
        std::string names;
        for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + name;
        fail(key, "expected one of " + names);
    }

    const json* object(const std::string& key) {
        if (!touch(key)) return nullptr;
        const json& v = obj_.at(key);
        if (!v.is_object()) {
            fail(key, "expected an object");
            return nullptr;
        }
        return &v;
    }

    void require(const std::string& key) {
        if (!has(key)) errors_.push_back(path(key) + ": missing required key");
    }

    void reject_unknown() {
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key())) errors_.push_back(path(item.key()) + ": unknown key");
    }

    void allow(const std::string& key) { seen_.insert(key); }

    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    void fail(const std::string& key, const std::string& what) {
        errors_.push_back(path(key) + ": " + what);
    }

private:
    bool touch(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key);
    }

    void number_value(const std::string& key, const json& v, double& out) {
        if (!v.is_number()) return fail(key, "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(key, "must be finite");
    }

    const json& obj_;
    std::string prefix_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

void read_profile(const json& j, const std::string& key, InitialProfile& profile,
                  std::vector<std::string>& errors) {
    Reader r(j, key, errors);
    std::string kind = profile.kind == ProfileKind::custom_table ? "table" : "bump";
    r.text("kind", kind);
    if (kind == "bump") {
        if (profile.kind != ProfileKind::parabolic_bump) profile = InitialProfile::bump(0.0, 1.0);
        r.number("left", profile.support_left);
        r.number("right", profile.support_right);
        r.number("amplitude", profile.amplitude);
    } else if (kind == "table") {
        profile.kind = ProfileKind::custom_table;
        r.allow("points");
        if (!r.has("points")) {
            r.require("points");
        } else if (!j.at("points").is_array()) {
            r.fail("points", "expected an array of [x, y] pairs");
        } else {
            profile.table.clear();
            const json& pts = j.at("points");
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const json& pt = pts[i];
                if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
                    r.fail("points[" + std::to_string(i) + "]", "expected [x, y]");
                    continue;
                }
                profile.table.emplace_back(pt[0].get<double>(), pt[1].get<double>());
            }
            if (!profile.table.empty()) {
                profile.support_left = profile.table.front().first;
                profile.support_right = profile.table.back().first;
            }
        }
    } else {
        r.fail("kind", "expected bump or table");
    }
    r.optional_number("mass", profile.normalize_mass_to);
    r.reject_unknown();
}

void profile_problems(const InitialProfile& p, const ExperimentConfig& c, const std::string& key,
                      std::vector<std::string>& out) {
    if (p.kind == ProfileKind::parabolic_bump) {
        if (!(p.support_left < p.support_right))
            out.push_back(key + ".left: must be below " + key + ".right");
        if (!(p.amplitude > 0.0)) out.push_back(key + ".amplitude: must be > 0");
    } else {
        if (p.table.size() < 2) out.push_back(key + ".points: need at least two points");
        for (std::size_t i = 1; i < p.table.size(); ++i)
            if (!(p.table[i].first > p.table[i - 1].first)) {
                out.push_back(key + ".points: abscissae must increase");
                break;
            }
        for (const auto& pt : p.table)
            if (!(pt.second >= 0.0)) {
                out.push_back(key + ".points: densities must be non-negative");
                break;
            }
    }
    if (p.support_left < c.x_left || p.support_right > c.x_right)
        out.push_back(key + ": support leaves [x_left, x_right]");
    if (p.normalize_mass_to && !(*p.normalize_mass_to > 0.0))
        out.push_back(key + ".mass: must be > 0");
}

ExperimentConfig fig1_base() {
    ExperimentConfig c;
    c.x_left = 0.0;
    c.x_right = 15.0;
    c.cells = 1500;
    c.k = 100.0;
    c.a1 = 1.0;
    c.a2 = 1.0;
    c.species1 = InitialProfile::bump(4.5, 6.5, 1.0);
    c.species2 = InitialProfile::bump(8.5, 10.5, 1.0);
    return c;
}

std::map<std::string, ExperimentConfig> build_presets() {
    std::map<std::string, ExperimentConfig> out;

    ExperimentConfig upper = fig1_base();
    upper.name = "fig1-upper";
    upper.nu = 1.0;
    upper.horizon = 8.0;
    upper.snapshots = {0.0, 8.0};
    out[upper.name] = upper;

    ExperimentConfig lower = fig1_base();
    lower.name = "fig1-lower";
    lower.nu = 0.01;
    lower.horizon = 5.0;
    lower.snapshots = {0.0, 5.0};
    out[lower.name] = lower;

    ExperimentConfig fig2 = fig1_base();
    fig2.name = "fig2";
    fig2.nu = 1.0;
    fig2.a1 = 2.0;
    fig2.a2 = 1.0;
    fig2.horizon = 5.0;
    fig2.snapshots = {0.0, 2.0, 4.0, 5.0};
    out[fig2.name] = fig2;

    ExperimentConfig fig3 = fig1_base();
    fig3.name = "fig3";
    fig3.nu = 1.0;
    fig3.a1 = 2.0;
    fig3.a2 = 1.0;
    fig3.species1 = InitialProfile::bump(6.5, 8.5, 1.0);
    fig3.species2 = InitialProfile::bump(6.0, 9.0, 1.0);
    fig3.horizon = 6.0;
    fig3.snapshots = {0.0, 2.0, 4.0, 6.0};
    out[fig3.name] = fig3;

    for (auto& [name, c] : out) c.output = "out/" + name;
    return out;
}

const std::map<std::string, ExperimentConfig>& presets() {
    static const auto table = build_presets();
    return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems)),
      problems_(std::move(problems)) {}

std::vector<double> ExperimentConfig::effective_snapshots() const {
    if (!snapshots.empty()) return snapshots;
    if (horizon > 0.0) return {0.0, horizon};
    return {0.0};
}

std::vector<std::string> ExperimentConfig::problems() const {
    std::vector<std::string> out;
    if (!(x_left < x_right)) out.push_back("x_left: must be below x_right");
    if (cells < 2) out.push_back("cells: need at least 2");
    if (!(k >= 2.0)) out.push_back("k: must be >= 2");
    if (!(nu > 0.0)) out.push_back("nu: must be > 0");
    if (!(a1 > 0.0)) out.push_back("a1: must be > 0");
    if (!(a2 > 0.0)) out.push_back("a2: must be > 0");
    if (p_max && !(*p_max >= std::max(a1, a2)))
        out.push_back("p_max: must be >= max(a1, a2)");
    if (!(horizon >= 0.0)) out.push_back("horizon: must be >= 0");
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const std::string key = "snapshots[" + std::to_string(i) + "]";
        if (!(snapshots[i] >= 0.0 && snapshots[i] <= horizon))
            out.push_back(key + ": outside [0, horizon]");
        if (i > 0 && !(snapshots[i] > snapshots[i - 1]))
            out.push_back(key + ": snapshot times must be strictly increasing");
    }
    if (!(cfl > 0.0 && cfl <= kMaxCfl)) out.push_back("cfl: must lie in (0, 0.5]");
    if (!(dt_max > 0.0)) out.push_back("dt_max: must be > 0");
    if (!growth && scheme != SchemeChoice::fv)
        out.push_back("growth: false is only supported by the fv scheme");
    if (output.empty()) out.push_back("output: must not be empty");
    if (workers < 1) out.push_back("workers: need at least 1");
    if (diag_every < 1) out.push_back("diag_every: need at least 1");
    profile_problems(species1, *this, "species1", out);
    profile_problems(species2, *this, "species2", out);
    return out;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, c] : presets()) names.push_back(name);
    return names;
}

bool is_preset(const std::string& name) { return presets().count(name) > 0; }

ExperimentConfig preset(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw ConfigError({"base: unknown preset '" + name + "'"});
    return it->second;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["base"] = c.base ? json(*c.base) : json(nullptr);
    j["x_left"] = c.x_left;
    j["x_right"] = c.x_right;
    j["cells"] = c.cells;
    j["k"] = c.k;
    j["nu"] = c.nu;
    j["a1"] = c.a1;
    j["a2"] = c.a2;
    j["p_max"] = c.effective_p_max();
    j["species1"] = profile_json(c.species1);
    j["species2"] = profile_json(c.species2);
    j["horizon"] = c.horizon;
    j["snapshots"] = c.effective_snapshots();
    j["scheme"] = scheme_name(c.scheme);
    j["cfl"] = c.cfl;
    j["dt_max"] = c.dt_max;
    j["exterior"] = exterior_name(c.exterior);
    j["growth"] = c.growth;
    j["output"] = c.output;
    j["workers"] = c.workers;
    j["diag_every"] = c.diag_every;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    std::vector<std::string> errors;
    if (!j.is_object()) throw ConfigError({"<root>: expected an object"});

    ExperimentConfig c;
    Reader r(j, "", errors);
    std::string base;
    if (j.contains("base") && j.at("base").is_null())
        r.allow("base");
    else
        r.text("base", base);
    if (!base.empty()) {
        if (is_preset(base)) {
            c = preset(base);
            c.base = base;
        } else {
            r.fail("base", "unknown preset '" + base + "'");
        }
    } else {
        for (const char* key : {"k", "nu", "horizon", "species1", "species2"}) r.require(key);
    }

    r.text("name", c.name);
    r.number("x_left", c.x_left);
    r.number("x_right", c.x_right);
    r.count("cells", c.cells);
    r.number("k", c.k);
    r.number("nu", c.nu);
    r.number("a1", c.a1);
    r.number("a2", c.a2);
    r.optional_number("p_max", c.p_max);
    for (const char* key : {"species1", "species2"}) {
        if (const json* obj = r.object(key))
            read_profile(*obj, key, std::string(key) == "species1" ? c.species1 : c.species2,
                         errors);
    }
    const bool had_horizon = r.has("horizon");
    r.number("horizon", c.horizon);
    if (r.has("snapshots"))
        r.numbers("snapshots", c.snapshots);
    else if (had_horizon)
        c.snapshots.clear();
    else
        r.allow("snapshots");
    r.choice<SchemeChoice>(
        "scheme", {{"fv", SchemeChoice::fv}, {"pr", SchemeChoice::pr}, {"both", SchemeChoice::both}},
        c.scheme);
    r.number("cfl", c.cfl);
    r.number("dt_max", c.dt_max);
    r.choice<Exterior>("exterior", {{"vacuum", Exterior::vacuum}, {"extend", Exterior::extend}},
                       c.exterior);
    r.boolean("growth", c.growth);
    r.text("output", c.output);
    r.count("workers", c.workers);
    r.count("diag_every", c.diag_every);
    r.reject_unknown();

    for (auto& p : c.problems()) errors.push_back(std::move(p));
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot read file"});
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError({path.string() + ": " + e.what()});
    }
    return config_from_json(j);
}

ExperimentConfig resolve_config(const std::string& name_or_path) {
    if (is_preset(name_or_path)) return preset(name_or_path);
    return load_config(name_or_path);
}

ModelParams model_params(const ExperimentConfig& c) {
    ModelParams params;
    params.k = c.k;
    params.nu = c.nu;
    params.g1 = GrowthLaw{c.a1};
    params.g2 = GrowthLaw{c.a2};
    params.p_max = c.effective_p_max();
    params.validate();
    return params;
}

Grid make_grid(const ExperimentConfig& c) { return Grid(c.x_left, c.x_right, c.cells); }

SpeciesState initial_state(const ExperimentConfig& c) {
    const Grid grid = make_grid(c);
    return SpeciesState(grid, build_initial(c.species1, grid), build_initial(c.species2, grid));
}

SchemeOptions scheme_options(const ExperimentConfig& c) {
    SchemeOptions o;
    o.cfl = c.cfl;
    o.dt_max = c.dt_max;
    o.exterior = c.exterior;
    o.growth = c.growth;
    return o;
}

PROptions pr_options(const ExperimentConfig& c) {
    PROptions o;
    o.cfl = c.cfl;
    o.dt_max = c.dt_max;
    o.exterior = c.exterior;
    return o;
}

}  // namespace tumour
