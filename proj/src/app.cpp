#include "lzsim/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace lzsim::app {

using dynamics::PropagationMode;
using qmath::Complex;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxHalvings = 3;

// Detuning beyond which the post-sweep analysis window may start.
constexpr double kWindowDelta = 20.0;
constexpr double kWindowMargin = 1.0;   // extra settle time after the threshold
constexpr double kWindowPeriods = 3.25; // minimum oscillation periods in the window

template <typename Fn>
auto with_dt_retry(Fn&& propagate, double dt0, double& dt_used, int& halvings) {
    double dt = dt0;
    for (int attempt = 0;; ++attempt) {
        try {
            auto traj = propagate(dt);
            dt_used = dt;
            halvings = attempt;
            return traj;
        } catch (const StepSizeError&) {
            if (attempt >= kMaxHalvings) throw;
            dt *= 0.5;
        }
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    try {
        schedule.validate();
        dissipation.validate();
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }
    if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (output_stride < 1) throw ConfigError("config: output_stride must be >= 1");
    if (hold_time < 0.0) throw ConfigError("config: hold_time must be >= 0");
    if (discord_every < 1) throw ConfigError("config: discord_every must be >= 1");
    if (scenario == Scenario::sweep_map) {
        if (grid.v0.empty() || grid.v.empty()) {
            throw ConfigError("config: sweep-map needs non-empty v0 and v grids");
        }
    }
}

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::single: return "single";
        case Scenario::pair_coherent: return "pair-coherent";
        case Scenario::pair_dissipative: return "pair-dissipative";
        case Scenario::sweep_map: return "sweep-map";
        default: return "invariants-check";
    }
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "single") return Scenario::single;
    if (name == "pair-coherent") return Scenario::pair_coherent;
    if (name == "pair-dissipative") return Scenario::pair_dissipative;
    if (name == "sweep-map") return Scenario::sweep_map;
    if (name == "invariants-check") return Scenario::invariants_check;
    throw ConfigError("unknown scenario '" + name + "'");
}

ScenarioConfig default_config(Scenario scenario) {
    ScenarioConfig cfg;
    cfg.scenario = scenario;
    cfg.schedule.omega = 1.0;
    cfg.schedule.delta_start = -100.0;
    cfg.schedule.delta_end = 100.0;
    switch (scenario) {
        case Scenario::single:
            cfg.schedule.v = 0.5;
            cfg.schedule.v0 = 0.0;
            break;
        case Scenario::pair_coherent:
            cfg.schedule.v = 2.42;
            cfg.schedule.v0 = 0.5;
            break;
        case Scenario::pair_dissipative:
            cfg.schedule.v = 2.42;
            cfg.schedule.v0 = 0.5;
            cfg.dissipation.gamma = 0.05;
            cfg.hold_time = 40.0;
            break;
        case Scenario::sweep_map:
            cfg.schedule.v = 2.42;
            cfg.schedule.v0 = 0.5;
            for (int i = 0; i < 40; ++i) {
                cfg.grid.v0.push_back(0.05 * std::pow(3.0 / 0.05, i / 39.0));
                cfg.grid.v.push_back(0.2 * std::pow(20.0 / 0.2, i / 39.0));
            }
            break;
        case Scenario::invariants_check:
            break;
    }
    return cfg;
}

std::vector<PeakEvent> find_local_maxima(const std::vector<double>& times,
                                         const std::vector<double>& values, double t_min) {
    std::vector<PeakEvent> peaks;
    if (times.size() != values.size() || times.size() < 3) return peaks;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (times[i] < t_min) continue;
        if (!(values[i] > values[i - 1]) || !(values[i] >= values[i + 1])) continue;
        PeakEvent peak{times[i], values[i], i};
        const double denom = values[i - 1] - 2.0 * values[i] + values[i + 1];
        if (denom < -1e-300) {
            const double offset = 0.5 * (values[i - 1] - values[i + 1]) / denom;
            const double h = 0.5 * (times[i + 1] - times[i - 1]);
            peak.t = times[i] + offset * h;
            peak.value = values[i] - 0.25 * (values[i - 1] - values[i + 1]) * offset;
        }
        peaks.push_back(peak);
    }
    return peaks;
}

namespace {

OscStats osc_stats_from_series(const std::vector<double>& times, const std::vector<double>& s_a,
                               double window_start, std::vector<PeakEvent>* peaks_out) {
    OscStats stats;
    stats.window_start = window_start;
    stats.window_end = times.back();
    stats.s_max = -std::numeric_limits<double>::infinity();
    stats.s_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_start) continue;
        stats.s_max = std::max(stats.s_max, s_a[i]);
        stats.s_min = std::min(stats.s_min, s_a[i]);
    }
    if (stats.s_min > stats.s_max) {  // empty window; should not happen for valid runs
        stats.s_max = stats.s_min = 0.0;
    }
    stats.s_amp = stats.s_max - stats.s_min;

    const std::vector<PeakEvent> peaks = find_local_maxima(times, s_a, window_start);
    stats.n_maxima = static_cast<int>(peaks.size());
    if (peaks.size() >= 2) {
        stats.period = (peaks.back().t - peaks.front().t) / double(peaks.size() - 1);
    } else {
        stats.period = std::numeric_limits<double>::quiet_NaN();
    }
    if (peaks_out) *peaks_out = peaks;
    return stats;
}

double analysis_window_start(const model::SweepSchedule& schedule) {
    return std::max(schedule.v0, kWindowDelta * schedule.omega) / schedule.v + kWindowMargin;
}

}  // namespace

SingleRunResult run_single_atom(const ScenarioConfig& cfg) {
    if (cfg.scenario != Scenario::single) {
        throw ConfigError("run_single_atom: scenario must be 'single'");
    }
    cfg.validate();

    SingleRunResult result;
    const StateVector psi0 = StateVector::basis_state(2, 0);
    result.traj = with_dt_retry(
        [&](double dt) {
            return dynamics::propagate_schrodinger(psi0, cfg.schedule, dt,
                                                   PropagationMode::single,
                                                   cfg.output_stride, cfg.hold_time);
        },
        cfg.dt, result.dt_used, result.dt_halvings);
    dynamics::relative_phases(result.traj);

    result.bloch.reserve(result.traj.size());
    for (const StateVector& psi : result.traj.states) {
        result.bloch.push_back(measures::bloch_vector(DensityMatrix::pure(psi)));
    }
    result.p_e_final = result.traj.populations.back()[1];
    result.p_lz = dynamics::lz_probability(cfg.schedule.omega, cfg.schedule.v);
    result.p_e_predicted = 1.0 - result.p_lz;
    return result;
}

CoherentRunResult run_pair_coherent(const ScenarioConfig& cfg) {
    if (cfg.scenario != Scenario::pair_coherent) {
        throw ConfigError("run_pair_coherent: scenario must be 'pair-coherent'");
    }
    cfg.validate();
    const model::SweepSchedule& sched = cfg.schedule;

    CoherentRunResult result;
    const double window_start = analysis_window_start(sched);
    double hold = cfg.hold_time;
    if (sched.v0 > 0.0) {
        const double period = 2.0 * kPi / sched.v0;
        const double required_end = window_start + kWindowPeriods * period;
        hold = std::max(hold, required_end - sched.t_end());
    }
    result.hold_used = hold;

    const StateVector psi0 = StateVector::basis_state(3, 0);
    result.traj = with_dt_retry(
        [&](double dt) {
            return dynamics::propagate_schrodinger(psi0, sched, dt,
                                                   PropagationMode::pair_symmetric,
                                                   cfg.output_stride, hold);
        },
        cfg.dt, result.dt_used, result.dt_halvings);
    dynamics::relative_phases(result.traj);

    const std::size_t n = result.traj.size();
    result.s_a.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StateVector& psi = result.traj.states[i];
        const auto breakdown = measures::entanglement_entropy_symmetric(
            std::abs(psi[0]), std::abs(psi[1]), std::abs(psi[2]),
            std::arg(psi[1]) - std::arg(psi[0]), std::arg(psi[2]) - std::arg(psi[0]));
        result.s_a.push_back(breakdown.entropy);
    }

    result.stats =
        osc_stats_from_series(result.traj.times, result.s_a, window_start, &result.maxima);
    for (const PeakEvent& peak : result.maxima) {
        result.max_states.emplace_back(peak.t, result.traj.states[peak.index]);
    }

    result.prediction =
        dynamics::asymptotic_pair_populations(sched.omega, sched.v, sched.v0);
    std::array<double, 3> sums{};
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (result.traj.times[i] < window_start) continue;
        const auto pops = dynamics::symmetric_populations(result.traj.states[i]);
        for (int k = 0; k < 3; ++k) sums[k] += pops[k];
        ++count;
    }
    if (count > 0) {
        for (int k = 0; k < 3; ++k) result.plateau[k] = sums[k] / double(count);
    }
    return result;
}

SweepMapResult run_sweep_map(const ScenarioConfig& cfg, int threads) {
    if (cfg.scenario != Scenario::sweep_map) {
        throw ConfigError("run_sweep_map: scenario must be 'sweep-map'");
    }
    cfg.validate();

    SweepMapResult result;
    result.grid = cfg.grid;
    const std::size_t n_v0 = cfg.grid.v0.size();
    const std::size_t n_v = cfg.grid.v.size();
    const std::size_t total = n_v0 * n_v;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.s_max.assign(total, nan);
    result.s_amp.assign(total, nan);
    result.errors.assign(total, "");

    int n_workers = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = static_cast<int>(std::min<std::size_t>(n_workers, total));

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            ScenarioConfig point = cfg;
            point.scenario = Scenario::pair_coherent;
            point.grid = GridSpec{};
            point.schedule.v0 = cfg.grid.v0[idx / n_v];
            point.schedule.v = cfg.grid.v[idx % n_v];
            try {
                const CoherentRunResult run = run_pair_coherent(point);
                result.s_max[idx] = run.stats.s_max;
                result.s_amp[idx] = run.stats.s_amp;
            } catch (const std::exception& err) {
                result.errors[idx] = err.what();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    return result;
}

DecayFitResult fit_decay_constants(const Trajectory& traj, double gamma, double tail_fraction) {
    if (!traj.dissipative) {
        throw DomainError("fit_decay_constants: expected a dissipative trajectory");
    }
    if (!(tail_fraction > 0.0) || tail_fraction > 0.5) {
        throw DomainError("fit_decay_constants: tail_fraction must lie in (0, 0.5]");
    }
    if (traj.size() < 4) throw DomainError("fit_decay_constants: trajectory too short");

    DecayFitResult fit;
    const double t_first = traj.times.front();
    const double t_last = traj.times.back();
    fit.window_start = t_last - tail_fraction * (t_last - t_first);
    fit.window_end = t_last;
    if (gamma <= 0.0) return fit;  // nothing to normalize the rates by

    std::vector<double> t_win;
    std::array<std::vector<double>, 3> series;  // 1 - rho_gg, rho_s, rho_rr
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < fit.window_start) continue;
        const auto pops = dynamics::symmetric_populations(traj.rhos[i]);
        t_win.push_back(traj.times[i]);
        series[0].push_back(1.0 - pops[0]);
        series[1].push_back(pops[1]);
        series[2].push_back(pops[2]);
    }
    if (t_win.size() < 3) return fit;

    double* cs[3] = {&fit.c1, &fit.c2, &fit.c3};
    for (int k = 0; k < 3; ++k) {
        const auto& y = series[k];
        if (std::any_of(y.begin(), y.end(), [](double v) { return v <= 0.0; })) continue;

        const std::size_t m = y.size();
        double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double ly = std::log(y[i]);
            st += t_win[i];
            sy += ly;
            stt += t_win[i] * t_win[i];
            sty += t_win[i] * ly;
        }
        const double denom = double(m) * stt - st * st;
        if (std::abs(denom) < 1e-300) continue;
        const double slope = (double(m) * sty - st * sy) / denom;
        const double intercept = (sy - slope * st) / double(m);

        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = std::log(y[i]) - (intercept + slope * t_win[i]);
            ss += r * r;
        }
        *cs[k] = -slope / gamma;
        fit.rms[k] = std::sqrt(ss / double(m));
        fit.fitted[k] = true;
    }
    return fit;
}

DissipativeRunResult run_pair_dissipative(const ScenarioConfig& cfg) {
    if (cfg.scenario != Scenario::pair_dissipative) {
        throw ConfigError("run_pair_dissipative: scenario must be 'pair-dissipative'");
    }
    cfg.validate();

    DissipativeRunResult result;
    const DensityMatrix rho0 = DensityMatrix::pure(StateVector::basis_state(4, 0));
    result.traj = with_dt_retry(
        [&](double dt) {
            return dynamics::propagate_lindblad(rho0, cfg.schedule, cfg.dissipation, dt,
                                                cfg.output_stride, cfg.hold_time);
        },
        cfg.dt, result.dt_used, result.dt_halvings);

    const std::size_t n = result.traj.size();
    result.sym_populations_s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.sym_populations_s.push_back(
            dynamics::symmetric_populations(result.traj.rhos[i])[1]);
    }

    for (std::size_t i = 0; i < n; i += cfg.discord_every) {
        const auto discord =
            measures::quantum_discord(result.traj.rhos[i], measures::MeasuredSide::B);
        result.discord_times.push_back(result.traj.times[i]);
        result.discord.push_back(discord.discord_ab);
    }
    result.discord_peaks = find_local_maxima(result.discord_times, result.discord,
                                             analysis_window_start(cfg.schedule));

    result.fit = fit_decay_constants(result.traj, cfg.dissipation.gamma, 0.3);
    return result;
}

InvariantsReport run_invariants_check(
    const std::vector<std::pair<std::string, DensityMatrix>>& states, double tol) {
    InvariantsReport report;
    report.tol = tol;

    const DensityMatrix bell_ref =
        DensityMatrix::pure(measures::bell_states().front().second);
    report.bell_row.name = "bell";
    report.bell_row.invariants = measures::lu_invariants(bell_ref);
    report.bell_row.max_residual_vs_bell = 0.0;
    report.bell_row.equivalent_to_bell = true;

    for (const auto& [name, rho] : states) {
        InvariantRow row;
        row.name = name;
        row.invariants = measures::lu_invariants(rho);
        const auto cmp = measures::lu_equivalent(rho, bell_ref, tol);
        row.max_residual_vs_bell = cmp.max_residual;
        row.equivalent_to_bell = cmp.equivalent;
        report.rows.push_back(std::move(row));
    }
    return report;
}

const std::vector<std::pair<std::string, StateVector>>& max_entangled_snapshots() {
    static const std::vector<std::pair<std::string, StateVector>> states = [] {
        const auto make = [](double a_gg, double a_s, double theta1, double a_rr,
                             double theta2) {
            return StateVector(3, {Complex{a_gg, 0.0}, std::polar(a_s, theta1),
                                   std::polar(a_rr, theta2)});
        };
        std::vector<std::pair<std::string, StateVector>> v;
        v.emplace_back("peak_1", make(0.54408, 0.64031, 3.94928, 0.54219, 4.75697));
        v.emplace_back("peak_2", make(0.52322, 0.6748, 1.40484, 0.52046, 5.95035));
        v.emplace_back("peak_3", make(0.530073, 0.66414, 3.76878, 0.52719, 4.39459));
        return v;
    }();
    return states;
}

}  // namespace lzsim::app
