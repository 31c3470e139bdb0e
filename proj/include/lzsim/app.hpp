#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lzsim/dynamics.hpp"
#include "lzsim/measures.hpp"

namespace lzsim::app {

using dynamics::Trajectory;
using qmath::DensityMatrix;
using qmath::StateVector;

enum class Scenario { single, pair_coherent, pair_dissipative, sweep_map, invariants_check };

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);

struct GridSpec {
    std::vector<double> v0;
    std::vector<double> v;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::single;
    model::SweepSchedule schedule;
    model::DissipationSpec dissipation;
    double dt = 1e-3;
    int output_stride = 10;
    double hold_time = 0.0;
    GridSpec grid;           // sweep-map only
    int discord_every = 25;  // dissipative only, in snapshot units

    void validate() const;
};

/// Baseline config per scenario (drive parameters of the reference runs).
ScenarioConfig default_config(Scenario scenario);

/// Strict JSON parsing: keys mirror ScenarioConfig field names exactly and
/// unknown keys are errors. `expected` cross-checks a scenario picked on the
/// command line against the file.
ScenarioConfig parse_config_json(const std::string& text,
                                 std::optional<Scenario> expected = std::nullopt);
ScenarioConfig parse_config_file(const std::string& path,
                                 std::optional<Scenario> expected = std::nullopt);

/// A refined local maximum of a sampled series.
struct PeakEvent {
    double t;
    double value;
    std::size_t index;  // sample index of the grid maximum
};

/// Three-point local maxima with parabolic sub-sample refinement,
/// restricted to t >= t_min.
std::vector<PeakEvent> find_local_maxima(const std::vector<double>& times,
                                         const std::vector<double>& values, double t_min);

/// Oscillation statistics of the entropy series over the post-sweep window.
struct OscStats {
    double s_max = 0.0;
    double s_min = 0.0;
    double s_amp = 0.0;
    double period = 0.0;  // NaN when fewer than two maxima are found
    double window_start = 0.0;
    double window_end = 0.0;
    int n_maxima = 0;
};

struct SingleRunResult {
    Trajectory traj;                             // phi_single filled
    std::vector<std::array<double, 3>> bloch;    // per snapshot
    double p_e_final = 0.0;
    double p_lz = 0.0;
    double p_e_predicted = 0.0;  // 1 - P_LZ
    double dt_used = 0.0;
    int dt_halvings = 0;
};

struct CoherentRunResult {
    Trajectory traj;  // theta1/theta2 filled
    std::vector<double> s_a;
    OscStats stats;
    std::vector<PeakEvent> maxima;  // S_A maxima inside the window
    std::vector<std::pair<double, StateVector>> max_states;
    dynamics::AsymptoticPrediction prediction;
    std::array<double, 3> plateau{};  // window means of p_gg, p_s, p_rr
    double hold_used = 0.0;
    double dt_used = 0.0;
    int dt_halvings = 0;
};

struct DecayFitResult {
    double c1 = 0.0;  // 1 - rho_gg ~ exp(-c1 gamma t)
    double c2 = 0.0;  // rho_s    ~ exp(-c2 gamma t)
    double c3 = 0.0;  // rho_rr   ~ exp(-c3 gamma t)
    std::array<double, 3> rms{};     // log-space fit residuals
    std::array<bool, 3> fitted{};    // false = skipped (non-positive data or gamma = 0)
    double window_start = 0.0;
    double window_end = 0.0;
};

struct DissipativeRunResult {
    Trajectory traj;
    std::vector<double> sym_populations_s;  // <s|rho|s> per snapshot
    std::vector<double> discord_times;
    std::vector<double> discord;
    std::vector<PeakEvent> discord_peaks;
    DecayFitResult fit;
    double dt_used = 0.0;
    int dt_halvings = 0;
};

struct SweepMapResult {
    GridSpec grid;
    std::vector<double> s_max;        // row-major [i_v0 * n_v + i_v]
    std::vector<double> s_amp;
    std::vector<std::string> errors;  // per point; empty string = success
    double& at_max(std::size_t i_v0, std::size_t i_v) { return s_max[i_v0 * grid.v.size() + i_v]; }
    double& at_amp(std::size_t i_v0, std::size_t i_v) { return s_amp[i_v0 * grid.v.size() + i_v]; }
};

struct InvariantRow {
    std::string name;
    measures::InvariantSet invariants;
    double max_residual_vs_bell = 0.0;
    bool equivalent_to_bell = false;
};

struct InvariantsReport {
    std::vector<InvariantRow> rows;
    InvariantRow bell_row;  // shared by all four Bell states
    double tol = 1e-3;
};

SingleRunResult run_single_atom(const ScenarioConfig& cfg);

/// Coherent pair run in the symmetric representation. The run is extended
/// at fixed final detuning when needed so the analysis window covers at
/// least three oscillation periods.
CoherentRunResult run_pair_coherent(const ScenarioConfig& cfg);

/// One pair-coherent run per (v0, v) grid point, distributed over a worker
/// pool; per-point failures are recorded and the map completes.
SweepMapResult run_sweep_map(const ScenarioConfig& cfg, int threads = 0);

DissipativeRunResult run_pair_dissipative(const ScenarioConfig& cfg);

/// Log-linear least squares on the trajectory tail: rho_s and rho_rr fit
/// exp(-c gamma t) directly, rho_gg through 1 - rho_gg.
DecayFitResult fit_decay_constants(const Trajectory& traj, double gamma, double tail_fraction);

/// Invariant table for the given states plus the Bell reference row, with
/// per-state equivalence verdicts at the given tolerance.
InvariantsReport run_invariants_check(
    const std::vector<std::pair<std::string, DensityMatrix>>& states, double tol = 1e-3);

/// Symmetric-basis states captured at the first three entanglement-entropy
/// maxima of the v0 = 0.5, v = 2.42 reference sweep (five-figure amplitudes).
const std::vector<std::pair<std::string, StateVector>>& max_entangled_snapshots();

// ----- output writers ---------------------------------------------------

void write_outputs(const ScenarioConfig& cfg, const SingleRunResult& result,
                   const std::string& out_dir);
void write_outputs(const ScenarioConfig& cfg, const CoherentRunResult& result,
                   const std::string& out_dir);
void write_outputs(const ScenarioConfig& cfg, const DissipativeRunResult& result,
                   const std::string& out_dir);
void write_outputs(const ScenarioConfig& cfg, const SweepMapResult& result,
                   const std::string& out_dir);
void write_outputs(const ScenarioConfig& cfg, const InvariantsReport& report,
                   const std::string& out_dir);

/// CSV bodies of the time-series outputs.
std::string timeseries_csv(const SingleRunResult& result);
std::string timeseries_csv(const CoherentRunResult& result);

/// Run the scenario selected by cfg and write everything under out_dir.
void run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, int threads = 0);

}  // namespace lzsim::app
