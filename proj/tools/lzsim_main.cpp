// lzsim: Landau-Zener sweep simulator for one and two interacting qubits.
//
// Usage: lzsim <scenario> [--config file.json] [--out dir] [overrides...]
// Exit codes: 0 success, 2 config error, 3 numerical-contract violation.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lzsim/app.hpp"
#include "lzsim/version.hpp"

namespace {

struct Overrides {
    std::optional<double> v;
    std::optional<double> v0;
    std::optional<double> gamma;
    std::optional<double> dt;
    std::optional<double> delta_span;
    std::optional<double> hold;
    int threads = 0;
};

void apply(const Overrides& ov, lzsim::app::ScenarioConfig& cfg) {
    if (ov.v) cfg.schedule.v = *ov.v;
    if (ov.v0) cfg.schedule.v0 = *ov.v0;
    if (ov.gamma) cfg.dissipation.gamma = *ov.gamma;
    if (ov.dt) cfg.dt = *ov.dt;
    if (ov.delta_span) {
        cfg.schedule.delta_start = -*ov.delta_span;
        cfg.schedule.delta_end = *ov.delta_span;
    }
    if (ov.hold) cfg.hold_time = *ov.hold;
    cfg.validate();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Landau-Zener sweep simulator for Rydberg qubit pairs"};
    cli.set_version_flag("--version", lzsim::kVersion);
    cli.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides ov;

    for (const char* name : {"single", "pair-coherent", "pair-dissipative", "sweep-map",
                             "invariants-check"}) {
        CLI::App* sub = cli.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario config file (JSON)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--v", ov.v, "sweep rate, units omega^2");
        sub->add_option("--v0", ov.v0, "interaction strength, units omega");
        sub->add_option("--gamma", ov.gamma, "decay rate, units omega");
        sub->add_option("--dt", ov.dt, "integrator step, units 1/omega");
        sub->add_option("--delta-span", ov.delta_span,
                        "sweep detuning from -span to +span, units omega");
        sub->add_option("--hold", ov.hold, "extra time at the final detuning");
        sub->add_option("--threads", ov.threads, "worker threads for sweep-map");
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return 2;
    }

    try {
        const auto scenario =
            lzsim::app::scenario_from_string(cli.get_subcommands().front()->get_name());
        lzsim::app::ScenarioConfig cfg =
            config_path.empty() ? lzsim::app::default_config(scenario)
                                : lzsim::app::parse_config_file(config_path, scenario);
        apply(ov, cfg);
        lzsim::app::run_scenario(cfg, out_dir, ov.threads);
        return 0;
    } catch (const lzsim::ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 2;
    } catch (const lzsim::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "unexpected error: " << err.what() << '\n';
        return 1;
    }
}
