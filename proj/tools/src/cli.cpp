#include "precoh_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "precoh/collapse.hpp"
#include "precoh/collision.hpp"
#include "precoh/denmat.hpp"
#include "precoh/io.hpp"
#include "precoh/measurement.hpp"
#include "precoh/rng.hpp"
#include "precoh/transport.hpp"

namespace precoh::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using StringMap = std::map<std::string, std::string>;

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

double to_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw TypeError("key '" + key + "': '" + value + "' is not a number");
    }
    if (pos != value.size())
        throw TypeError("key '" + key + "': '" + value + "' is not a number");
    return v;
}

long to_long(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    if (v != std::floor(v) || std::abs(v) > 9e18)
        throw TypeError("key '" + key + "': '" + value + "' is not an integer");
    return static_cast<long>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw TypeError("key '" + key + "': '" + value + "' is not an unsigned integer");
    }
    if (pos != value.size())
        throw TypeError("key '" + key + "': '" + value + "' is not an unsigned integer");
    return v;
}

std::vector<double> to_vector(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw TypeError("key '" + key + "': empty list");
    return out;
}

std::string canonical(double v) { return format_double(v); }

// A JSON value from a config file, rendered to the same canonical string a
// flag would produce.
std::string json_to_string(const std::string& key, const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return canonical(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!item.is_number())
                throw TypeError("key '" + key + "': arrays must hold numbers");
            if (!out.empty()) out += ',';
            out += canonical(item.get<double>());
        }
        return out;
    }
    throw TypeError("key '" + key + "': unsupported value type in config file");
}

StringMap load_json_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw TypeError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw TypeError("config file: top level must be an object");
    StringMap out;
    for (const auto& [key, value] : j.items())
        out[normalize_key(key)] = json_to_string(key, value);
    return out;
}

// Flat TOML subset: `key = value` lines, # comments, quoted strings,
// [a, b] numeric arrays, bare scalars. No sections.
StringMap load_toml_config(const std::string& text) {
    StringMap out;
    std::stringstream ss(text);
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(ss, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[')
            throw TypeError("config file: sections are not supported ('" + line + "')");
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw TypeError("config file: expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw TypeError("config file: expected 'key = value', got '" + line + "'");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        else if (value.front() == '[') {
            if (value.back() != ']')
                throw TypeError("key '" + key + "': unterminated array");
            value = value.substr(1, value.size() - 2);
            std::string joined;
            std::stringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty()) throw TypeError("key '" + key + "': empty array element");
                if (!joined.empty()) joined += ',';
                joined += item;
            }
            value = joined;
        }
        out[normalize_key(key)] = value;
    }
    return out;
}

StringMap load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingRequired("key 'config': cannot open file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return load_json_config(text);
    return load_toml_config(text);
}

struct ParamSpec {
    std::string key;
    bool required = false;
    std::string default_value;  // empty string means no default
};

const std::map<std::string, std::vector<ParamSpec>>& command_schemas() {
    static const std::map<std::string, std::vector<ParamSpec>> schemas = {
        {"collapse",
         {{"p", true, ""},
          {"trials", true, ""},
          {"dt", false, "0.001"},
          {"tau_c", false, "1"},
          {"max_steps", false, "10000000"}}},
        {"kpp",
         {{"mode", true, ""},
          {"t_end", false, "100"},
          {"x_max", false, "250"},
          {"h", false, "0.25"},
          {"dt", false, "0.025"},
          {"sample_every", false, "20"},
          {"transient", false, "20"}}},
        {"front-walk",
         {{"steps", false, "40"},
          {"walkers", false, "1"},
          {"cap", false, "1000000000000"},
          {"site_cap", false, "16"}}},
        {"scatter",
         {{"dim_a", false, "4"},
          {"dim_m", false, "2"},
          {"count", false, "8"}}},
        {"omega",
         {{"dim", false, "8"},
          {"molecule_dim", false, "2"},
          {"rate", false, "2"},
          {"t_end", false, "10"},
          {"dt", false, "0.01"},
          {"temperature", false, "1"}}},
        {"scenario",
         {{"name", true, ""},
          {"trials", true, ""},
          {"p1", false, "0.5"},
          {"weights", false, ""},
          {"dt_over_tau_c", false, "0.001"},
          {"max_steps", false, "10000000"}}},
        {"timescale",
         {{"energy_ev", false, "10000000"},
          {"excitation_ev", false, "10"},
          {"length_cm", false, "10"},
          {"cell_width_cm", false, "3e-05"},
          {"mfp_cm", false, "1e-05"},
          {"tau_s", false, "1e-10"},
          {"profile", false, "uniform"},
          {"bragg_s", false, "0.5"},
          {"target_s", false, "1e-11"}}},
    };
    return schemas;
}

void validate_params(RunConfig& cfg) {
    const auto& params = cfg.params;
    auto num = [&](const std::string& key) { return to_double(key, params.at(key)); };
    auto integer = [&](const std::string& key) { return to_long(key, params.at(key)); };
    auto positive = [&](const std::string& key) {
        if (num(key) <= 0) throw TypeError("key '" + key + "': must be positive");
    };
    auto positive_int = [&](const std::string& key) {
        if (integer(key) <= 0) throw TypeError("key '" + key + "': must be a positive integer");
    };

    if (cfg.command == "collapse") {
        const auto p = to_vector("p", params.at("p"));
        if (p.size() < 2) throw TypeError("key 'p': need at least two probabilities");
        double sum = 0;
        for (double v : p) {
            if (v < 0) throw OffSimplex("key 'p': negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw OffSimplex("key 'p': probabilities sum to " + canonical(sum) + ", not 1");
        positive_int("trials");
        positive("dt");
        positive("tau_c");
        positive_int("max_steps");
    } else if (cfg.command == "kpp") {
        const auto& mode = params.at("mode");
        if (mode != "free" && mode != "moving")
            throw TypeError("key 'mode': expected 'free' or 'moving', got '" + mode + "'");
        positive("t_end");
        positive("x_max");
        positive("h");
        positive("dt");
        positive_int("sample_every");
        if (num("transient") < 0) throw TypeError("key 'transient': must be non-negative");
    } else if (cfg.command == "front-walk") {
        positive_int("steps");
        positive_int("walkers");
        positive_int("cap");
        positive_int("site_cap");
    } else if (cfg.command == "scatter") {
        positive_int("dim_a");
        positive_int("dim_m");
        positive_int("count");
    } else if (cfg.command == "omega") {
        positive_int("dim");
        positive_int("molecule_dim");
        positive("rate");
        positive("t_end");
        positive("dt");
        positive("temperature");
    } else if (cfg.command == "scenario") {
        const auto& name = params.at("name");
        static const std::set<std::string> names = {"geiger_case1", "geiger_case2",
                                                    "stern_gerlach", "cat_tracks"};
        if (!names.count(name))
            throw TypeError("key 'name': unknown scenario '" + name + "'");
        const double p1 = num("p1");
        if (p1 < 0 || p1 > 1) throw OffSimplex("key 'p1': outside [0, 1]");
        if (name == "cat_tracks") {
            if (params.at("weights").empty())
                throw MissingRequired("key 'weights': required for cat_tracks");
            to_vector("weights", params.at("weights"));
        }
        positive_int("trials");
        positive("dt_over_tau_c");
        positive_int("max_steps");
    } else if (cfg.command == "timescale") {
        for (const char* key : {"energy_ev", "excitation_ev", "length_cm", "cell_width_cm",
                                "mfp_cm", "tau_s", "target_s"})
            positive(key);
        const auto& profile = params.at("profile");
        if (profile != "uniform" && profile != "bragg_like")
            throw TypeError("key 'profile': expected 'uniform' or 'bragg_like', got '" +
                            profile + "'");
        const double s = num("bragg_s");
        if (s < 0 || s >= 1) throw TypeError("key 'bragg_s': must lie in [0, 1)");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
    auto arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

struct Artifacts {
    fs::path dir;
    std::vector<std::string> files;

    void add_text(const std::string& name, const std::string& text) {
        const fs::path p = dir / name;
        write_text(p, text);
        files.push_back(p.string());
    }
    void add_json(const std::string& name, const ordered_json& j) {
        add_text(name, j.dump(2) + "\n");
    }
};

void run_collapse(const RunConfig& cfg, Artifacts& out) {
    const auto& params = cfg.params;
    const auto pvec = to_vector("p", params.at("p"));
    Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(pvec.data(),
                                                           static_cast<Eigen::Index>(pvec.size()));
    const long trials = to_long("trials", params.at("trials"));
    const double dt = to_double("dt", params.at("dt"));
    const double tau_c = to_double("tau_c", params.at("tau_c"));
    const long max_steps = to_long("max_steps", params.at("max_steps"));

    const EnsembleStats stats = ensemble(p0, dt, tau_c, trials, cfg.seed, max_steps);

    // Full trajectory of trial 0, with the same per-trial seed the ensemble
    // uses.
    std::vector<SimplexState> history;
    SimplexState state = make_simplex(p0);
    history.push_back(state);
    Rng rng = make_rng(derive_seed(cfg.seed, 0));
    for (long i = 0; i < max_steps && state.winner() < 0; ++i) {
        state = step(state, dt, tau_c, rng);
        history.push_back(state);
    }

    ordered_json j;
    j["trials"] = stats.trials;
    j["exceeded"] = stats.exceeded;
    j["win_frequency"] = vector_json(stats.win_frequency);
    j["mean_collapse_time"] = stats.mean_collapse_time;
    out.add_json("collapse_stats.json", j);

    std::ostringstream csv;
    write_collapse_csv(csv, history);
    out.add_text("collapse_trajectory.csv", csv.str());
}

void run_kpp(const RunConfig& cfg, Artifacts& out) {
    const auto& params = cfg.params;
    const KppMode mode =
        params.at("mode") == "free" ? KppMode::free_boundary : KppMode::moving_boundary;
    const double t_end = to_double("t_end", params.at("t_end"));
    const double h = to_double("h", params.at("h"));
    const double dt = to_double("dt", params.at("dt"));
    const double x_max = to_double("x_max", params.at("x_max"));
    const long sample_every = to_long("sample_every", params.at("sample_every"));
    const double transient = to_double("transient", params.at("transient"));

    FrontField field = make_front_field(x_max, h, true);
    std::vector<FrontField> history{field};
    const long n_steps = static_cast<long>(std::floor(t_end / dt + 0.5));
    for (long i = 1; i <= n_steps; ++i) {
        field = kpp_step(field, dt, mode);
        if (i % sample_every == 0 || i == n_steps) history.push_back(field);
    }
    const double speed = front_speed(history, transient);

    // Small-amplitude sourceless run for the linear growth rate: with g << 1
    // the reaction term is effectively linear and the mass grows at unit
    // rate.
    FrontField lin = make_front_field(x_max, h, false);
    const double center = x_max / 2.0;
    for (std::size_t i = 0; i < lin.values.size(); ++i) {
        const double x = static_cast<double>(i) * h - center;
        lin.values[i] = 1e-6 * std::exp(-x * x / 8.0);
    }
    lin.values.front() = 0.0;
    std::vector<double> lin_times{0.0};
    std::vector<double> lin_mass{field_mass(lin)};
    const long lin_steps = static_cast<long>(std::floor(5.0 / dt + 0.5));
    for (long i = 1; i <= lin_steps; ++i) {
        lin = kpp_step(lin, dt, KppMode::free_boundary);
        if (i % sample_every == 0) {
            lin_times.push_back(lin.time);
            lin_mass.push_back(field_mass(lin));
        }
    }
    const double linear_rate = growth_rate(lin_times, lin_mass, 0, lin_times.size());

    ordered_json j;
    j["mode"] = params.at("mode");
    j["t_end"] = t_end;
    j["front_speed"] = speed;
    j["linear_growth_rate"] = linear_rate;
    out.add_json("kpp_report.json", j);

    std::ostringstream csv;
    write_kpp_csv(csv, history);
    out.add_text("kpp.csv", csv.str());

    std::ostringstream prof;
    write_field_snapshot_csv(prof, history.back());
    out.add_text("kpp_profile.csv", prof.str());
}

void run_front_walk(const RunConfig& cfg, Artifacts& out) {
    const auto& params = cfg.params;
    const int steps = static_cast<int>(to_long("steps", params.at("steps")));
    const std::int64_t walkers = to_long("walkers", params.at("walkers"));
    const std::int64_t cap = to_long("cap", params.at("cap"));
    const std::int64_t site_cap = to_long("site_cap", params.at("site_cap"));

    const auto history = duplication_walk(make_walk(walkers), steps, cap, cfg.seed, site_cap);

    std::vector<double> times, totals;
    for (const auto& pop : history) {
        times.push_back(static_cast<double>(pop.step));
        totals.push_back(static_cast<double>(pop.total()));
    }
    // Fit only the pre-saturation window: site-cap truncation breaks the
    // doubling once the population passes the cap.
    std::size_t unsaturated = totals.size();
    for (std::size_t i = 1; i < totals.size(); ++i)
        if (totals[i] < 1.99 * totals[i - 1]) {
            unsaturated = i;
            break;
        }
    const double rate = growth_rate(times, totals, 0, unsaturated);
    const double front_speed =
        static_cast<double>(history.back().front_position() - history.front().front_position()) /
        static_cast<double>(history.back().step - history.front().step);

    ordered_json j;
    j["steps"] = steps;
    j["growth_rate"] = rate;
    j["front_speed_planes_per_step"] = front_speed;
    j["plane_spacing_mfp"] = kWalkPlaneSpacingFactor;
    out.add_json("walk_report.json", j);

    std::ostringstream csv;
    write_walk_csv(csv, history);
    out.add_text("walk.csv", csv.str());
}

void run_scatter(const RunConfig& cfg, Artifacts& out) {
    const auto& params = cfg.params;
    const int dim_a = static_cast<int>(to_long("dim_a", params.at("dim_a")));
    const int dim_m = static_cast<int>(to_long("dim_m", params.at("dim_m")));
    const long count = to_long("count", params.at("count"));

    Rng rng = make_rng(cfg.seed);
    std::normal_distribution<double> gauss;
    // Generic full-rank state: A A^dagger normalized.
    Matrix a(dim_a, dim_a);
    for (int r = 0; r < dim_a; ++r)
        for (int c = 0; c < dim_a; ++c) a(r, c) = {gauss(rng), gauss(rng)};
    Matrix raw = a * a.adjoint();
    const DensityMatrix rho_a(raw / raw.trace().real(), 1.0);
    const DensityMatrix molecule(Matrix::Identity(dim_m, dim_m) / dim_m, 1.0);

    double eps_sum = 0.0, max_trace_gap = 0.0, max_trace_err = 0.0;
    CollisionDelta last = scatter(rho_a, molecule, haar_unitary(dim_a * dim_m, rng));
    for (long i = 0;; ++i) {
        const double gap =
            std::abs(last.delta_plus.trace().real() - last.delta_minus.trace().real());
        max_trace_gap = std::max(max_trace_gap, gap);
        max_trace_err = std::max(max_trace_err, std::abs(last.rho_after.trace() - 1.0));
        eps_sum += last.epsilon;
        if (i + 1 >= count) break;
        last = scatter(rho_a, molecule, haar_unitary(dim_a * dim_m, rng));
    }

    ordered_json j;
    j["dim_a"] = dim_a;
    j["dim_m"] = dim_m;
    j["count"] = count;
    j["mean_epsilon"] = eps_sum / static_cast<double>(count);
    j["max_trace_gap"] = max_trace_gap;
    j["max_trace_error"] = max_trace_err;
    j["last_epsilon"] = last.epsilon;
    out.add_json("scatter_report.json", j);

    out.add_text("rho_after.json", density_to_json(last.rho_after) + "\n");
}

void run_omega(const RunConfig& cfg, Artifacts& out) {
    const auto& params = cfg.params;
    const int dim = static_cast<int>(to_long("dim", params.at("dim")));
    const int molecule_dim = static_cast<int>(to_long("molecule_dim", params.at("molecule_dim")));
    const double rate = to_double("rate", params.at("rate"));
    const double t_end = to_double("t_end", params.at("t_end"));
    const double dt = to_double("dt", params.at("dt"));
    const double temperature = to_double("temperature", params.at("temperature"));

    Rng rng = make_rng(derive_seed(cfg.seed, 0));
    std::normal_distribution<double> gauss;
    Matrix h(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) h(r, c) = {gauss(rng), gauss(rng)};
    h = Matrix((h + h.adjoint()) / 2.0);

    const DensityMatrix rho0 = thermal_state(h, temperature);
    const auto schedule =
        random_collision_schedule(rate, t_end, derive_seed(cfg.seed, 1), dim, molecule_dim);
    const OmegaTrajectory traj = evolve_with_source(rho0, h, schedule, t_end, dt);

    double max_trace_omega = 0.0;
    for (const auto& omega : traj.omega)
        max_trace_omega = std::max(max_trace_omega, std::abs(omega.trace().real()));
    const std::size_t tail = traj.trace_plus.size() - traj.trace_plus.size() / 4;
    double plateau = 0.0;
    for (std::size_t i = tail; i < traj.trace_plus.size(); ++i) plateau += traj.trace_plus[i];
    plateau /= static_cast<double>(traj.trace_plus.size() - tail);

    ordered_json j;
    j["dim"] = dim;
    j["collisions"] = schedule.size();
    j["max_abs_trace_omega"] = max_trace_omega;
    j["trace_plus_plateau"] = plateau;
    j["final_purity"] = traj.purity.back();
    j["final_similarity"] = traj.similarity_iso.back();
    out.add_json("omega_report.json", j);

    std::ostringstream csv;
    write_omega_csv(csv, traj);
    out.add_text("omega.csv", csv.str());
}

void run_scenario_cmd(const RunConfig& cfg, Artifacts& out) {
    const auto& params = cfg.params;
    const auto& name = params.at("name");
    ScenarioParams sp;
    sp.p1 = to_double("p1", params.at("p1"));
    sp.track = default_track();
    ScenarioKind kind = ScenarioKind::geiger_case1;
    if (name == "geiger_case2") kind = ScenarioKind::geiger_case2;
    else if (name == "stern_gerlach") kind = ScenarioKind::stern_gerlach;
    else if (name == "cat_tracks") {
        kind = ScenarioKind::cat_tracks;
        sp.weights = to_vector("weights", params.at("weights"));
    }
    const long trials = to_long("trials", params.at("trials"));
    const double dt_over_tau_c = to_double("dt_over_tau_c", params.at("dt_over_tau_c"));
    const long max_steps = to_long("max_steps", params.at("max_steps"));

    const Scenario scenario = make_scenario(kind, sp);
    const double dt_seconds = dt_over_tau_c * pooled_timescale(scenario);
    const ScenarioResult result = run_scenario(scenario, dt_seconds, trials, cfg.seed, max_steps);

    ordered_json j;
    j["name"] = scenario.name;
    j["channels"] = vector_json(scenario.channels);
    auto mute = ordered_json::array();
    for (bool m : scenario.mute) mute.push_back(m);
    j["mute"] = mute;
    j["tau_c_seconds"] = result.tau_c_seconds;
    j["dt_seconds"] = dt_seconds;
    j["trials"] = result.stats.trials;
    j["exceeded"] = result.stats.exceeded;
    j["win_frequency"] = vector_json(result.stats.win_frequency);
    j["mean_collapse_time_seconds"] = result.stats.mean_collapse_time;
    out.add_json("scenario_stats.json", j);
}

void run_timescale(const RunConfig& cfg, Artifacts& out) {
    const auto& params = cfg.params;
    const DepositionProfile profile = params.at("profile") == "uniform"
                                          ? DepositionProfile::uniform
                                          : DepositionProfile::bragg_like;
    const TrackModel track = build_track(
        to_double("energy_ev", params.at("energy_ev")),
        to_double("excitation_ev", params.at("excitation_ev")),
        to_double("length_cm", params.at("length_cm")),
        to_double("cell_width_cm", params.at("cell_width_cm")),
        to_double("mfp_cm", params.at("mfp_cm")), to_double("tau_s", params.at("tau_s")),
        profile, to_double("bragg_s", params.at("bragg_s")));
    const TimescaleReport report =
        timescale_report(track, to_double("target_s", params.at("target_s")));

    ordered_json j;
    ordered_json p;
    for (const auto& [key, value] : params) p[key] = value;
    j["parameters"] = p;
    j["n_total"] = track.n_total;
    j["n_cells"] = track.n_cells;
    j["tau_c_seconds"] = report.tau_c_seconds;
    j["target_comparison"] = {{"target", report.target_seconds},
                              {"computed", report.tau_c_seconds},
                              {"ratio", report.ratio}};
    j["discrepancy_note"] = report.discrepancy_note;
    out.add_json("timescale.json", j);
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
    if (args.empty()) throw MissingRequired("key 'command': no command given");
    RunConfig cfg;
    cfg.command = args[0];
    const auto& schemas = command_schemas();
    const auto schema_it = schemas.find(cfg.command);
    if (schema_it == schemas.end())
        throw UnknownKey("command '" + cfg.command + "' is not recognized");
    const auto& schema = schema_it->second;

    StringMap flags;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& token = args[i];
        if (token.size() < 3 || token.compare(0, 2, "--") != 0)
            throw TypeError("argument '" + token + "': expected a --key");
        std::string key = token.substr(2);
        std::string value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= args.size())
                throw MissingRequired("key '" + key + "': flag given without a value");
            value = args[++i];
        }
        flags[normalize_key(key)] = value;
    }

    StringMap merged;
    if (const auto it = flags.find("config"); it != flags.end()) {
        merged = load_config_file(it->second);
        flags.erase(it);
    }
    for (const auto& [key, value] : flags) merged[key] = value;

    std::set<std::string> allowed = {"seed", "output_dir"};
    for (const auto& spec : schema) allowed.insert(spec.key);
    for (const auto& [key, value] : merged)
        if (!allowed.count(key)) throw UnknownKey("key '" + key + "' is not recognized");

    if (!merged.count("seed"))
        throw MissingRequired("key 'seed': required (no implicit entropy source)");
    cfg.seed = to_u64("seed", merged.at("seed"));

    if (const auto it = merged.find("output_dir"); it != merged.end()) {
        cfg.output_dir = it->second;
    } else if (const char* env = std::getenv("PRECOH_OUTPUT_DIR"); env && *env) {
        cfg.output_dir = env;
    } else {
        cfg.output_dir = ".";
    }

    for (const auto& spec : schema) {
        if (const auto it = merged.find(spec.key); it != merged.end())
            cfg.params[spec.key] = it->second;
        else if (spec.required)
            throw MissingRequired("key '" + spec.key + "': required for " + cfg.command);
        else
            cfg.params[spec.key] = spec.default_value;
    }

    validate_params(cfg);
    return cfg;
}

std::vector<std::string> execute(const RunConfig& config) {
    Artifacts out;
    out.dir = config.output_dir;
    fs::create_directories(out.dir);

    ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["command"] = config.command;
    manifest["seed"] = config.seed;
    manifest["output_dir"] = config.output_dir;
    ordered_json p;
    for (const auto& [key, value] : config.params) p[key] = value;
    manifest["params"] = p;
    out.add_json("manifest.json", manifest);

    if (config.command == "collapse") run_collapse(config, out);
    else if (config.command == "kpp") run_kpp(config, out);
    else if (config.command == "front-walk") run_front_walk(config, out);
    else if (config.command == "scatter") run_scatter(config, out);
    else if (config.command == "omega") run_omega(config, out);
    else if (config.command == "scenario") run_scenario_cmd(config, out);
    else if (config.command == "timescale") run_timescale(config, out);
    else throw UnknownKey("command '" + config.command + "' is not recognized");

    return out.files;
}

int run(const std::vector<std::string>& args) {
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        execute(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace precoh::cli
