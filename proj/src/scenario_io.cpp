#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lzsim/app.hpp"
#include "lzsim/model.hpp"
#include "lzsim/version.hpp"

namespace lzsim::app {

namespace {

using nlohmann::json;

// All emitted numbers carry 12 significant digits.
std::string fmt12(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

// Round a double through the 12-digit representation before it enters a
// JSON document, so both output formats agree.
json jnum(double value) {
    if (!std::isfinite(value)) return json();  // serialized as null
    return json(std::stod(fmt12(value)));
}

void expect_keys(const json& obj, const char* where,
                 std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
        }
    }
}

double require_number(const json& v, const char* name) {
    if (!v.is_number()) throw ConfigError(std::string("config: ") + name + " must be a number");
    return v.get<double>();
}

int require_int(const json& v, const char* name) {
    if (!v.is_number_integer()) {
        throw ConfigError(std::string("config: ") + name + " must be an integer");
    }
    return v.get<int>();
}

std::vector<double> require_number_list(const json& v, const char* name) {
    if (!v.is_array()) throw ConfigError(std::string("config: ") + name + " must be an array");
    std::vector<double> out;
    for (const auto& item : v) out.push_back(require_number(item, name));
    return out;
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& text, std::optional<Scenario> expected) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config: invalid JSON: ") + err.what());
    }
    expect_keys(root, "config",
                {"scenario", "schedule", "dissipation", "dt", "output_stride", "hold_time",
                 "grid", "discord_every"});

    std::optional<Scenario> from_file;
    if (root.contains("scenario")) {
        if (!root["scenario"].is_string()) {
            throw ConfigError("config: scenario must be a string");
        }
        from_file = scenario_from_string(root["scenario"].get<std::string>());
    }
    if (expected && from_file && *expected != *from_file) {
        throw ConfigError("config: file scenario '" + to_string(*from_file) +
                          "' does not match requested '" + to_string(*expected) + "'");
    }
    if (!expected && !from_file) {
        throw ConfigError("config: no scenario given on the command line or in the file");
    }

    ScenarioConfig cfg = default_config(from_file ? *from_file : *expected);

    if (root.contains("schedule")) {
        const json& s = root["schedule"];
        expect_keys(s, "config.schedule", {"omega", "v", "delta_start", "delta_end", "v0"});
        if (s.contains("omega")) cfg.schedule.omega = require_number(s["omega"], "omega");
        if (s.contains("v")) cfg.schedule.v = require_number(s["v"], "v");
        if (s.contains("delta_start")) {
            cfg.schedule.delta_start = require_number(s["delta_start"], "delta_start");
        }
        if (s.contains("delta_end")) {
            cfg.schedule.delta_end = require_number(s["delta_end"], "delta_end");
        }
        if (s.contains("v0")) cfg.schedule.v0 = require_number(s["v0"], "v0");
    }
    if (root.contains("dissipation")) {
        const json& d = root["dissipation"];
        expect_keys(d, "config.dissipation", {"gamma"});
        if (d.contains("gamma")) cfg.dissipation.gamma = require_number(d["gamma"], "gamma");
    }
    if (root.contains("dt")) cfg.dt = require_number(root["dt"], "dt");
    if (root.contains("output_stride")) {
        cfg.output_stride = require_int(root["output_stride"], "output_stride");
    }
    if (root.contains("hold_time")) cfg.hold_time = require_number(root["hold_time"], "hold_time");
    if (root.contains("grid")) {
        const json& g = root["grid"];
        expect_keys(g, "config.grid", {"v0", "v"});
        if (g.contains("v0")) cfg.grid.v0 = require_number_list(g["v0"], "grid.v0");
        if (g.contains("v")) cfg.grid.v = require_number_list(g["v"], "grid.v");
    }
    if (root.contains("discord_every")) {
        cfg.discord_every = require_int(root["discord_every"], "discord_every");
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path, std::optional<Scenario> expected) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str(), expected);
}

namespace {

json config_json(const ScenarioConfig& cfg) {
    json j;
    j["scenario"] = to_string(cfg.scenario);
    j["schedule"] = {{"omega", jnum(cfg.schedule.omega)},
                     {"v", jnum(cfg.schedule.v)},
                     {"delta_start", jnum(cfg.schedule.delta_start)},
                     {"delta_end", jnum(cfg.schedule.delta_end)},
                     {"v0", jnum(cfg.schedule.v0)}};
    j["dissipation"] = {{"gamma", jnum(cfg.dissipation.gamma)}};
    j["dt"] = jnum(cfg.dt);
    j["output_stride"] = cfg.output_stride;
    j["hold_time"] = jnum(cfg.hold_time);
    if (cfg.scenario == Scenario::sweep_map) {
        json v0 = json::array(), v = json::array();
        for (double x : cfg.grid.v0) v0.push_back(jnum(x));
        for (double x : cfg.grid.v) v.push_back(jnum(x));
        j["grid"] = {{"v0", v0}, {"v", v}};
    }
    if (cfg.scenario == Scenario::pair_dissipative) j["discord_every"] = cfg.discord_every;
    return j;
}

json base_summary(const ScenarioConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["config"] = config_json(cfg);
    return j;
}

void write_file(const std::string& out_dir, const std::string& name,
                const std::string& body) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << body;
}

json osc_stats_json(const OscStats& stats) {
    return {{"s_max", jnum(stats.s_max)},       {"s_min", jnum(stats.s_min)},
            {"s_amp", jnum(stats.s_amp)},       {"period", jnum(stats.period)},
            {"window_start", jnum(stats.window_start)},
            {"window_end", jnum(stats.window_end)},
            {"n_maxima", stats.n_maxima}};
}

json prediction_json(const dynamics::AsymptoticPrediction& p) {
    return {{"p_lz", jnum(p.p_lz)},
            {"q_lz", jnum(p.q_lz)},
            {"p_gg_inf", jnum(p.p_gg_inf)},
            {"p_rr_inf", jnum(p.p_rr_inf)}};
}

json fit_json(const DecayFitResult& fit) {
    return {{"c1", fit.fitted[0] ? jnum(fit.c1) : json()},
            {"c2", fit.fitted[1] ? jnum(fit.c2) : json()},
            {"c3", fit.fitted[2] ? jnum(fit.c3) : json()},
            {"rms", {jnum(fit.rms[0]), jnum(fit.rms[1]), jnum(fit.rms[2])}},
            {"fitted", {fit.fitted[0], fit.fitted[1], fit.fitted[2]}},
            {"window_start", jnum(fit.window_start)},
            {"window_end", jnum(fit.window_end)}};
}

json invariant_row_json(const InvariantRow& row) {
    const auto f = row.invariants.flatten();
    json values = json::array();
    for (double x : f) values.push_back(jnum(x));
    return {{"state", row.name},
            {"invariants", values},
            {"max_residual_vs_bell", jnum(row.max_residual_vs_bell)},
            {"equivalent_to_bell", row.equivalent_to_bell}};
}

}  // namespace

std::string timeseries_csv(const SingleRunResult& result) {
    std::string csv = "t,p_g,p_e,phi,bloch_x,bloch_y,bloch_z\n";
    for (std::size_t i = 0; i < result.traj.size(); ++i) {
        csv += fmt12(result.traj.times[i]) + ',' + fmt12(result.traj.populations[i][0]) + ',' +
               fmt12(result.traj.populations[i][1]) + ',' + fmt12(result.traj.phi_single[i]) +
               ',' + fmt12(result.bloch[i][0]) + ',' + fmt12(result.bloch[i][1]) + ',' +
               fmt12(result.bloch[i][2]) + '\n';
    }
    return csv;
}

std::string timeseries_csv(const CoherentRunResult& result) {
    std::string csv = "t,p_gg,p_s,p_rr,theta1,theta2,s_a\n";
    for (std::size_t i = 0; i < result.traj.size(); ++i) {
        const auto& pops = result.traj.populations[i];
        csv += fmt12(result.traj.times[i]) + ',' + fmt12(pops[0]) + ',' + fmt12(pops[1]) + ',' +
               fmt12(pops[2]) + ',' + fmt12(result.traj.theta1[i]) + ',' +
               fmt12(result.traj.theta2[i]) + ',' + fmt12(result.s_a[i]) + '\n';
    }
    return csv;
}

void write_outputs(const ScenarioConfig& cfg, const SingleRunResult& result,
                   const std::string& out_dir) {
    write_file(out_dir, "timeseries.csv", timeseries_csv(result));

    json summary = base_summary(cfg);
    summary["lz"] = {{"p_lz", jnum(result.p_lz)},
                     {"p_e_predicted", jnum(result.p_e_predicted)},
                     {"p_e_final", jnum(result.p_e_final)},
                     {"abs_error", jnum(std::abs(result.p_e_final - result.p_e_predicted))}};
    summary["integration"] = {{"dt_used", jnum(result.dt_used)},
                              {"dt_halvings", result.dt_halvings},
                              {"max_norm_drift", jnum(result.traj.max_norm_drift)}};
    write_file(out_dir, "summary.json", summary.dump(2) + "\n");
}

void write_outputs(const ScenarioConfig& cfg, const CoherentRunResult& result,
                   const std::string& out_dir) {
    write_file(out_dir, "timeseries.csv", timeseries_csv(result));

    json summary = base_summary(cfg);
    summary["osc_stats"] = osc_stats_json(result.stats);
    summary["prediction"] = prediction_json(result.prediction);
    summary["plateau"] = {{"p_gg", jnum(result.plateau[0])},
                          {"p_s", jnum(result.plateau[1])},
                          {"p_rr", jnum(result.plateau[2])}};
    json maxima = json::array();
    const std::size_t n_listed = std::min<std::size_t>(result.max_states.size(), 12);
    for (std::size_t i = 0; i < n_listed; ++i) {
        const auto& [t, psi] = result.max_states[i];
        maxima.push_back({{"t", jnum(t)},
                          {"a_gg", jnum(std::abs(psi[0]))},
                          {"a_s", jnum(std::abs(psi[1]))},
                          {"a_rr", jnum(std::abs(psi[2]))},
                          {"theta1", jnum(std::arg(psi[1]) - std::arg(psi[0]))},
                          {"theta2", jnum(std::arg(psi[2]) - std::arg(psi[0]))}});
    }
    summary["maxima"] = maxima;
    summary["integration"] = {{"dt_used", jnum(result.dt_used)},
                              {"dt_halvings", result.dt_halvings},
                              {"hold_used", jnum(result.hold_used)},
                              {"max_norm_drift", jnum(result.traj.max_norm_drift)}};
    write_file(out_dir, "summary.json", summary.dump(2) + "\n");
}

void write_outputs(const ScenarioConfig& cfg, const DissipativeRunResult& result,
                   const std::string& out_dir) {
    std::string csv = "t,p_gg,p_s,p_rr\n";
    for (std::size_t i = 0; i < result.traj.size(); ++i) {
        csv += fmt12(result.traj.times[i]) + ',' + fmt12(result.traj.populations[i][0]) + ',' +
               fmt12(result.sym_populations_s[i]) + ',' +
               fmt12(result.traj.populations[i][3]) + '\n';
    }
    write_file(out_dir, "timeseries.csv", csv);

    std::string discord_csv = "t,discord\n";
    for (std::size_t i = 0; i < result.discord.size(); ++i) {
        discord_csv += fmt12(result.discord_times[i]) + ',' + fmt12(result.discord[i]) + '\n';
    }
    write_file(out_dir, "discord.csv", discord_csv);

    json summary = base_summary(cfg);
    summary["decay_fit"] = fit_json(result.fit);
    json peaks = json::array();
    for (const PeakEvent& p : result.discord_peaks) {
        peaks.push_back({{"t", jnum(p.t)}, {"value", jnum(p.value)}});
    }
    summary["discord_peaks"] = peaks;
    summary["integration"] = {{"dt_used", jnum(result.dt_used)},
                              {"dt_halvings", result.dt_halvings},
                              {"max_trace_drift", jnum(result.traj.max_trace_drift)},
                              {"min_eigenvalue", jnum(result.traj.min_eigenvalue)}};
    write_file(out_dir, "summary.json", summary.dump(2) + "\n");
}

void write_outputs(const ScenarioConfig& cfg, const SweepMapResult& result,
                   const std::string& out_dir) {
    const auto matrix_csv = [&](const std::vector<double>& data) {
        std::string csv = "v0";
        for (double v : result.grid.v) csv += ',' + fmt12(v);
        csv += '\n';
        for (std::size_t i = 0; i < result.grid.v0.size(); ++i) {
            csv += fmt12(result.grid.v0[i]);
            for (std::size_t j = 0; j < result.grid.v.size(); ++j) {
                csv += ',' + fmt12(data[i * result.grid.v.size() + j]);
            }
            csv += '\n';
        }
        return csv;
    };
    write_file(out_dir, "s_max.csv", matrix_csv(result.s_max));
    write_file(out_dir, "s_amp.csv", matrix_csv(result.s_amp));

    json summary = base_summary(cfg);
    json failures = json::array();
    for (std::size_t i = 0; i < result.errors.size(); ++i) {
        if (result.errors[i].empty()) continue;
        failures.push_back({{"i_v0", i / result.grid.v.size()},
                            {"i_v", i % result.grid.v.size()},
                            {"error", result.errors[i]}});
    }
    summary["failures"] = failures;
    write_file(out_dir, "summary.json", summary.dump(2) + "\n");
}

void write_outputs(const ScenarioConfig& cfg, const InvariantsReport& report,
                   const std::string& out_dir) {
    std::string csv =
        "state,t1_b0,t1_b1,t1_b2,t2_b0,t2_b1,t2_b2,cross_b0,cross_b1,cross_b2,"
        "tr1,tr2,tr3,det,max_residual_vs_bell,equivalent_to_bell\n";
    const auto add_row = [&](const InvariantRow& row) {
        csv += row.name;
        for (double x : row.invariants.flatten()) csv += ',' + fmt12(x);
        csv += ',' + fmt12(row.max_residual_vs_bell) + ',' +
               (row.equivalent_to_bell ? std::string("true") : std::string("false")) + '\n';
    };
    for (const InvariantRow& row : report.rows) add_row(row);
    add_row(report.bell_row);
    write_file(out_dir, "invariants.csv", csv);

    json summary = base_summary(cfg);
    summary["tol"] = jnum(report.tol);
    json rows = json::array();
    for (const InvariantRow& row : report.rows) rows.push_back(invariant_row_json(row));
    summary["rows"] = rows;
    summary["bell_row"] = invariant_row_json(report.bell_row);
    write_file(out_dir, "summary.json", summary.dump(2) + "\n");
}

void run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, int threads) {
    switch (cfg.scenario) {
        case Scenario::single:
            write_outputs(cfg, run_single_atom(cfg), out_dir);
            break;
        case Scenario::pair_coherent:
            write_outputs(cfg, run_pair_coherent(cfg), out_dir);
            break;
        case Scenario::pair_dissipative:
            write_outputs(cfg, run_pair_dissipative(cfg), out_dir);
            break;
        case Scenario::sweep_map:
            write_outputs(cfg, run_sweep_map(cfg, threads), out_dir);
            break;
        case Scenario::invariants_check: {
            std::vector<std::pair<std::string, DensityMatrix>> states;
            for (const auto& [name, psi] : max_entangled_snapshots()) {
                states.emplace_back(name,
                                    DensityMatrix::pure(model::embed_symmetric_state(psi)));
            }
            for (const auto& [name, psi] : measures::bell_states()) {
                states.emplace_back(name, DensityMatrix::pure(psi));
            }
            states.emplace_back("product_gg",
                                DensityMatrix::pure(StateVector::basis_state(4, 0)));
            write_outputs(cfg, run_invariants_check(states), out_dir);
            break;
        }
    }
}

}  // namespace lzsim::app
