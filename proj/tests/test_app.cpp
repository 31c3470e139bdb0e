#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "lzsim/app.hpp"
#include "test_helpers.hpp"

using namespace lzsim;
using app::Scenario;
using app::ScenarioConfig;
using qmath::Complex;
using qmath::ComplexMatrix;
using qmath::DensityMatrix;
using qmath::StateVector;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config parsing applies defaults and rejects unknown keys") {
    const ScenarioConfig cfg = app::parse_config_json(
        R"({"scenario": "pair-coherent", "schedule": {"v": 3.0}, "dt": 0.002})");
    CHECK(cfg.scenario == Scenario::pair_coherent);
    CHECK(cfg.schedule.v == 3.0);
    CHECK(cfg.schedule.v0 == 0.5);  // default kept
    CHECK(cfg.schedule.delta_start == -100.0);
    CHECK(cfg.dt == 0.002);
    CHECK(cfg.output_stride == 10);

    CHECK_THROWS_AS(app::parse_config_json(R"({"scenario": "single", "dtt": 1})"), ConfigError);
    CHECK_THROWS_AS(
        app::parse_config_json(R"({"scenario": "single", "schedule": {"rate": 1}})"),
        ConfigError);
    CHECK_THROWS_AS(app::parse_config_json(R"({"scenario": "nope"})"), ConfigError);
    CHECK_THROWS_AS(app::parse_config_json(R"({"dt": 0.001})"), ConfigError);  // no scenario
    CHECK_THROWS_AS(app::parse_config_json("not json"), ConfigError);

    // scenario cross-check against the command line
    CHECK_THROWS_AS(
        app::parse_config_json(R"({"scenario": "single"})", Scenario::pair_coherent),
        ConfigError);
    CHECK(app::parse_config_json(R"({})", Scenario::single).scenario == Scenario::single);

    // invalid numbers surface as config errors
    CHECK_THROWS_AS(
        app::parse_config_json(R"({"scenario": "single", "schedule": {"v": -1}})"),
        ConfigError);
    CHECK_THROWS_AS(app::parse_config_json(R"({"scenario": "single", "dt": 0})"), ConfigError);
    CHECK_THROWS_AS(
        app::parse_config_json(R"({"scenario": "sweep-map", "grid": {"v0": [], "v": [1]}})"),
        ConfigError);
}

TEST_CASE("local maxima refinement") {
    std::vector<double> t, y;
    for (int i = 0; i <= 1000; ++i) {
        t.push_back(0.01 * i);
        y.push_back(std::sin(2.0 * kPi * 0.01 * i / 2.5));  // period 2.5, maxima at 0.625+2.5n
    }
    const auto peaks = app::find_local_maxima(t, y, 1.0);
    REQUIRE(peaks.size() == 3);
    CHECK(peaks[0].t == doctest::Approx(3.125).epsilon(1e-4));
    CHECK(peaks[1].t == doctest::Approx(5.625).epsilon(1e-4));
    CHECK(peaks[2].t == doctest::Approx(8.125).epsilon(1e-4));
    for (const auto& p : peaks) CHECK(p.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("single-atom runs cross hemispheres only for slow sweeps") {
    ScenarioConfig slow = app::default_config(Scenario::single);
    slow.schedule.v = 0.5;
    const auto rs = app::run_single_atom(slow);
    CHECK(std::abs(rs.p_e_final - rs.p_e_predicted) <= 0.01);
    double zmin = 1e9;
    for (const auto& b : rs.bloch) zmin = std::min(zmin, b[2]);
    CHECK(zmin < 0.0);  // Bloch vector visits the |r> hemisphere
    CHECK(rs.bloch.front()[2] == doctest::Approx(1.0));

    ScenarioConfig fast = app::default_config(Scenario::single);
    fast.schedule.v = 5.0;
    const auto rf = app::run_single_atom(fast);
    CHECK(std::abs(rf.p_e_final - rf.p_e_predicted) <= 0.01);
    zmin = 1e9;
    for (const auto& b : rf.bloch) zmin = std::min(zmin, b[2]);
    CHECK(zmin > 0.0);  // stays in the starting hemisphere
}

TEST_CASE("reference coherent run satisfies the oscillation contract") {
    const ScenarioConfig cfg = app::default_config(Scenario::pair_coherent);
    const auto res = app::run_pair_coherent(cfg);

    CHECK(res.stats.s_max >= 0.99);
    CHECK(res.stats.s_min <= 0.05);
    CHECK(res.stats.s_amp == doctest::Approx(res.stats.s_max - res.stats.s_min));
    CHECK(res.stats.s_amp <= res.stats.s_max);

    const double period = 2.0 * kPi / cfg.schedule.v0;
    CHECK(std::abs(res.stats.period - period) / period < 0.05);

    // window invariant: starts after the last crossing, where delta > 20,
    // and spans at least three periods
    CHECK(res.stats.window_start >= cfg.schedule.v0 / cfg.schedule.v);
    CHECK(res.stats.window_start * cfg.schedule.v > 20.0 * cfg.schedule.omega);
    CHECK(res.stats.window_end - res.stats.window_start >= 3.0 * period);

    // plateau tracks the analytic p_gg prediction
    CHECK(std::abs(res.plateau[0] - res.prediction.p_gg_inf) <= 0.02);

    // every captured maximum is a near-unit-entropy state at phase pi
    REQUIRE(res.max_states.size() >= 3);
    for (const auto& [t_max, psi] : res.max_states) {
        const double combo =
            2.0 * (std::arg(psi[1]) - std::arg(psi[0])) - (std::arg(psi[2]) - std::arg(psi[0]));
        CHECK(std::abs(std::remainder(combo - kPi, 2.0 * kPi)) < 0.05);
    }
    for (const auto& peak : res.maxima) CHECK(peak.value > 0.99);
}

TEST_CASE("oscillation frequency scales linearly with the interaction") {
    ScenarioConfig weak = app::default_config(Scenario::pair_coherent);
    const auto rw = app::run_pair_coherent(weak);
    ScenarioConfig strong = weak;
    strong.schedule.v0 = 2.0;
    const auto rs = app::run_pair_coherent(strong);
    const double ratio = rw.stats.period / rs.stats.period;
    CHECK(std::abs(ratio - 4.0) / 4.0 < 0.05);
}

TEST_CASE("identical configs produce identical output bytes") {
    ScenarioConfig cfg = app::default_config(Scenario::pair_coherent);
    cfg.schedule.delta_start = -40.0;
    cfg.schedule.delta_end = 40.0;
    const auto a = app::run_pair_coherent(cfg);
    const auto b = app::run_pair_coherent(cfg);
    CHECK(app::timeseries_csv(a) == app::timeseries_csv(b));
}

TEST_CASE("sweep map points reproduce standalone runs exactly") {
    ScenarioConfig cfg = app::default_config(Scenario::sweep_map);
    cfg.schedule.delta_start = -60.0;
    cfg.schedule.delta_end = 60.0;
    cfg.grid.v0 = {0.4, 1.0};
    cfg.grid.v = {1.5, 2.42, 6.0};
    const auto map = app::run_sweep_map(cfg, 2);
    REQUIRE(map.s_max.size() == 6);

    for (std::size_t i = 0; i < cfg.grid.v0.size(); ++i) {
        for (std::size_t j = 0; j < cfg.grid.v.size(); ++j) {
            ScenarioConfig point = cfg;
            point.scenario = Scenario::pair_coherent;
            point.grid = app::GridSpec{};
            point.schedule.v0 = cfg.grid.v0[i];
            point.schedule.v = cfg.grid.v[j];
            const auto standalone = app::run_pair_coherent(point);
            const std::size_t idx = i * cfg.grid.v.size() + j;
            CHECK(map.s_max[idx] == standalone.stats.s_max);  // bit-exact
            CHECK(map.s_amp[idx] == standalone.stats.s_amp);
            CHECK(map.s_amp[idx] <= map.s_max[idx]);
            CHECK(map.errors[idx].empty());
        }
    }
}

TEST_CASE("fast sweeps at weak interaction stay nearly uncorrelated") {
    ScenarioConfig cfg = app::default_config(Scenario::pair_coherent);
    cfg.schedule.v0 = 0.1;
    cfg.schedule.v = 20.0;
    const auto res = app::run_pair_coherent(cfg);
    CHECK(res.stats.s_max < 0.2);  // system mostly remains in |gg>
    CHECK(res.plateau[0] > 0.8);
}

TEST_CASE("sweep map records per-point failures and completes") {
    ScenarioConfig cfg = app::default_config(Scenario::sweep_map);
    cfg.schedule.delta_start = -30.0;
    cfg.schedule.delta_end = 30.0;
    cfg.grid.v0 = {0.5};
    cfg.grid.v = {2.42, 0.0};  // second point has an invalid rate
    const auto map = app::run_sweep_map(cfg, 1);
    CHECK(map.errors[0].empty());
    CHECK_FALSE(map.errors[1].empty());
    CHECK(map.s_max[0] > 0.0);
    CHECK(std::isnan(map.s_max[1]));
}

TEST_CASE("decay fit recovers a synthetic exponential exactly") {
    const double gamma = 0.2, c_true = 0.3;
    dynamics::Trajectory traj;
    traj.dissipative = true;
    for (int i = 0; i <= 400; ++i) {
        const double t = 0.1 * i;
        const double e = std::exp(-c_true * gamma * t);
        ComplexMatrix m(4);
        m(0, 0) = 1.0 - 0.5 * e;
        m(1, 1) = 0.15 * e;
        m(2, 2) = 0.15 * e;
        m(3, 3) = 0.2 * e;
        traj.times.push_back(t);
        traj.rhos.emplace_back(m);
        traj.populations.push_back({m(0, 0).real(), m(1, 1).real(), m(2, 2).real(),
                                    m(3, 3).real()});
    }
    const auto fit = app::fit_decay_constants(traj, gamma, 0.4);
    CHECK(fit.fitted[0]);
    CHECK(fit.fitted[1]);
    CHECK(fit.fitted[2]);
    CHECK(fit.c1 == doctest::Approx(c_true).epsilon(1e-3));
    CHECK(fit.c2 == doctest::Approx(c_true).epsilon(1e-3));
    CHECK(fit.c3 == doctest::Approx(c_true).epsilon(1e-3));
    CHECK(fit.rms[0] < 1e-9);

    CHECK_THROWS_AS(app::fit_decay_constants(traj, gamma, 0.0), DomainError);
    CHECK_THROWS_AS(app::fit_decay_constants(traj, gamma, 0.6), DomainError);
    dynamics::Trajectory coherent;
    coherent.dissipative = false;
    CHECK_THROWS_AS(app::fit_decay_constants(coherent, gamma, 0.3), DomainError);
}

TEST_CASE("decay fit skips series that touch zero") {
    dynamics::Trajectory traj;
    traj.dissipative = true;
    for (int i = 0; i <= 100; ++i) {
        const double t = 0.1 * i;
        ComplexMatrix m(4);
        m(0, 0) = 1.0;  // rho_s = rho_rr = 0 in the tail
        traj.times.push_back(t);
        traj.rhos.emplace_back(m);
        traj.populations.push_back({1.0, 0.0, 0.0, 0.0});
    }
    const auto fit = app::fit_decay_constants(traj, 0.1, 0.3);
    CHECK_FALSE(fit.fitted[0]);
    CHECK_FALSE(fit.fitted[1]);
    CHECK_FALSE(fit.fitted[2]);
}

TEST_CASE("pure-decay run fits the double-decay constant") {
    ScenarioConfig cfg = app::default_config(Scenario::pair_dissipative);
    cfg.schedule.omega = 0.0;
    cfg.schedule.delta_start = -1e-9;
    cfg.schedule.delta_end = 0.0;
    cfg.dissipation.gamma = 0.1;
    cfg.hold_time = 25.0;
    // start from |rr>
    const DensityMatrix rho0 = DensityMatrix::pure(StateVector::basis_state(4, 3));
    const auto traj = dynamics::propagate_lindblad(rho0, cfg.schedule, cfg.dissipation,
                                                   cfg.dt, cfg.output_stride, cfg.hold_time);
    const auto fit = app::fit_decay_constants(traj, cfg.dissipation.gamma, 0.3);
    REQUIRE(fit.fitted[2]);
    CHECK(fit.c3 == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("fitted ground-state constant grows like sqrt(v)") {
    // gamma and hold chosen so the fit window straddles the approach to the
    // steady state; probed stable across nearby holds.
    double lx[4], ly[4];
    int i = 0;
    double prev = -1.0;
    bool monotone = true;
    for (double v : {1.0, 2.25, 4.0, 6.25}) {
        ScenarioConfig cfg = app::default_config(Scenario::pair_dissipative);
        cfg.schedule.v = v;
        cfg.schedule.v0 = 0.5;
        cfg.dissipation.gamma = 0.1;
        cfg.hold_time = 50.0;
        cfg.output_stride = 20;
        const auto res = app::run_pair_dissipative(cfg);
        REQUIRE(res.fit.fitted[0]);
        CHECK(res.fit.c1 > 0.0);
        if (res.fit.c1 <= prev) monotone = false;
        prev = res.fit.c1;
        lx[i] = std::log(v);
        ly[i] = std::log(res.fit.c1);
        ++i;
    }
    CHECK(monotone);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < 4; ++k) {
        sx += lx[k];
        sy += ly[k];
        sxx += lx[k] * lx[k];
        sxy += lx[k] * ly[k];
    }
    const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
    CHECK(slope > 0.35);
    CHECK(slope < 0.65);
}

TEST_CASE("dissipative run: decaying discord peaks with intact frequency") {
    ScenarioConfig base = app::default_config(Scenario::pair_dissipative);
    base.schedule.delta_start = -40.0;
    base.schedule.delta_end = 40.0;
    base.hold_time = 45.0;
    base.discord_every = 25;

    ScenarioConfig coherent_like = base;
    coherent_like.dissipation.gamma = 0.0;
    const auto r0 = app::run_pair_dissipative(coherent_like);

    ScenarioConfig damped = base;
    damped.dissipation.gamma = 0.05;
    const auto rd = app::run_pair_dissipative(damped);

    REQUIRE(r0.discord_peaks.size() >= 3);
    REQUIRE(rd.discord_peaks.size() >= 3);

    // peak values strictly decrease under dissipation
    for (std::size_t i = 1; i < rd.discord_peaks.size(); ++i) {
        CHECK(rd.discord_peaks[i].value < rd.discord_peaks[i - 1].value);
    }
    // oscillation frequency is left intact within 5%
    const auto period = [](const std::vector<app::PeakEvent>& p) {
        return (p.back().t - p.front().t) / double(p.size() - 1);
    };
    CHECK(std::abs(period(rd.discord_peaks) - period(r0.discord_peaks)) /
              period(r0.discord_peaks) <
          0.05);
}

TEST_CASE("gamma = 0 discord series equals the coherent entropy") {
    ScenarioConfig dcfg = app::default_config(Scenario::pair_dissipative);
    dcfg.dissipation.gamma = 0.0;
    dcfg.schedule.delta_start = -40.0;
    dcfg.schedule.delta_end = 40.0;
    dcfg.hold_time = 20.0;
    dcfg.discord_every = 50;
    const auto dis = app::run_pair_dissipative(dcfg);

    ScenarioConfig ccfg = app::default_config(Scenario::pair_coherent);
    ccfg.schedule.delta_start = -40.0;
    ccfg.schedule.delta_end = 40.0;
    ccfg.hold_time = 20.0;
    const auto coh = app::run_pair_coherent(ccfg);

    std::size_t checked = 0;
    for (std::size_t i = 0; i < dis.discord.size(); ++i) {
        const double t = dis.discord_times[i];
        for (std::size_t j = 0; j < coh.traj.times.size(); ++j) {
            if (std::abs(coh.traj.times[j] - t) < 1e-9) {
                CHECK(std::abs(dis.discord[i] - coh.s_a[j]) < 1e-3);
                ++checked;
                break;
            }
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("strong decay drives the pair into the ground state") {
    ScenarioConfig cfg = app::default_config(Scenario::pair_dissipative);
    cfg.dissipation.gamma = 0.5;
    cfg.hold_time = 40.0;
    cfg.discord_every = 400;
    const auto res = app::run_pair_dissipative(cfg);
    CHECK(res.traj.populations.back()[0] >= 0.99);
    CHECK(res.traj.max_trace_drift < 1e-8);
    CHECK(res.traj.min_eigenvalue >= -1e-6);
}

TEST_CASE("invariants report flags Bell-equivalent states") {
    std::vector<std::pair<std::string, DensityMatrix>> states;
    for (const auto& [name, psi] : app::max_entangled_snapshots()) {
        states.emplace_back(name, DensityMatrix::pure(model::embed_symmetric_state(psi)));
    }
    for (const auto& [name, psi] : measures::bell_states()) {
        states.emplace_back(name, DensityMatrix::pure(psi));
    }
    states.emplace_back("product_gg", DensityMatrix::pure(StateVector::basis_state(4, 0)));

    const auto report = app::run_invariants_check(states, 1e-3);
    REQUIRE(report.rows.size() == 8);
    for (const auto& row : report.rows) {
        if (row.name == "product_gg") {
            CHECK_FALSE(row.equivalent_to_bell);
        } else {
            CHECK(row.equivalent_to_bell);
        }
    }
    // the four Bell states share one invariant row
    const auto bell_flat = report.bell_row.invariants.flatten();
    for (const auto& row : report.rows) {
        if (row.name.rfind("phi", 0) == 0 || row.name.rfind("psi", 0) == 0) {
            const auto flat = row.invariants.flatten();
            for (int i = 0; i < 13; ++i) CHECK(std::abs(flat[i] - bell_flat[i]) < 1e-12);
        }
    }
}

TEST_CASE("writers emit the documented files and schemas") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "lzsim_test_out";
    fs::remove_all(dir);

    ScenarioConfig cfg = app::default_config(Scenario::single);
    cfg.schedule.delta_start = -20.0;
    cfg.schedule.delta_end = 20.0;
    const auto res = app::run_single_atom(cfg);
    app::write_outputs(cfg, res, dir.string());

    const std::string csv = slurp(dir / "timeseries.csv");
    CHECK(csv.rfind("t,p_g,p_e,phi,bloch_x,bloch_y,bloch_z\n", 0) == 0);

    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.contains("version"));
    CHECK(summary.contains("config"));
    CHECK(summary["lz"].contains("p_e_final"));

    // the config echo itself parses back into the same configuration
    const ScenarioConfig echoed = app::parse_config_json(summary["config"].dump());
    CHECK(echoed.scenario == cfg.scenario);
    CHECK(echoed.schedule.v == cfg.schedule.v);
    CHECK(echoed.schedule.delta_start == cfg.schedule.delta_start);
    CHECK(echoed.dt == cfg.dt);

    // pair-coherent schema
    ScenarioConfig pcfg = app::default_config(Scenario::pair_coherent);
    pcfg.schedule.delta_start = -30.0;
    pcfg.schedule.delta_end = 30.0;
    const auto pres = app::run_pair_coherent(pcfg);
    app::write_outputs(pcfg, pres, dir.string());
    CHECK(slurp(dir / "timeseries.csv").rfind("t,p_gg,p_s,p_rr,theta1,theta2,s_a\n", 0) == 0);
    const auto psummary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(psummary.contains("osc_stats"));
    CHECK(psummary.contains("prediction"));

    fs::remove_all(dir);
}
