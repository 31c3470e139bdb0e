#pragma once

#include <cstdint>
#include <vector>

#include "lzsim/model.hpp"
#include "lzsim/qmath.hpp"

namespace lzsim::dynamics {

using model::DissipationSpec;
using model::SweepSchedule;
using qmath::DensityMatrix;
using qmath::StateVector;

enum class PropagationMode { single, pair_symmetric, pair_full };

/// Time grid with per-snapshot state (coherent) or density matrix
/// (dissipative) plus derived series. Phases are filled by relative_phases.
struct Trajectory {
    PropagationMode mode = PropagationMode::single;
    bool dissipative = false;
    double dt = 0.0;
    int stride = 1;

    std::vector<double> times;
    std::vector<StateVector> states;             // coherent runs
    std::vector<DensityMatrix> rhos;             // dissipative runs
    std::vector<std::array<double, 4>> populations;  // diabatic-basis populations

    // Pair modes: theta1 = arg(a_s) - arg(a_gg), theta2 = arg(a_rr) - arg(a_gg),
    // unwrapped by continuity. phase_ok flags samples with a usable reference.
    std::vector<double> theta1;
    std::vector<double> theta2;
    std::vector<std::uint8_t> phase_ok;
    std::vector<double> phi_single;              // single-atom relative phase

    double max_norm_drift = 0.0;   // per-step, before renormalization
    double max_trace_drift = 0.0;  // per-step, before rescaling
    double min_eigenvalue = 0.0;   // positivity monitor, checked per snapshot

    std::size_t size() const { return times.size(); }
};

/// Fixed-step RK4 integration of i d/dt psi = H(t) psi over the sweep,
/// then (optionally) a hold segment at delta_end. The state is
/// renormalized every step; drift beyond 1e-6 raises StepSizeError.
Trajectory propagate_schrodinger(const StateVector& psi0, const SweepSchedule& schedule,
                                 double dt, PropagationMode mode, int output_stride = 10,
                                 double hold_time = 0.0);

/// Fixed-step RK4 on the master equation
/// d rho/dt = -i[H(t), rho] + sum_i C_i rho C_i^+ - (1/2){C_i^+ C_i, rho}
/// with C_i = sqrt(gamma) |g><r| acting on atom i, in the full pair basis.
/// rho is symmetrized and trace-rescaled every step; positivity is
/// monitored at snapshot cadence (min eigenvalue >= -1e-6).
Trajectory propagate_lindblad(const DensityMatrix& rho0, const SweepSchedule& schedule,
                              const DissipationSpec& dissipation, double dt,
                              int output_stride = 10, double hold_time = 0.0);

/// Fill the relative-phase series of a coherent trajectory, unwrapped by
/// continuity (successive differences folded into (-pi, pi]). Samples with
/// |reference amplitude| < 1e-6 are flagged and bridged, not fatal.
Trajectory& relative_phases(Trajectory& traj);

/// P_LZ = exp(-pi omega^2 / (2 v)).
double lz_probability(double omega, double v);

struct AsymptoticPrediction {
    double p_lz;
    double q_lz;        // p_lz * exp(-pi omega^2 v0 / (4 v^{3/2}))
    double p_gg_inf;    // p_lz^2
    double p_rr_inf;    // 1 - q_lz^2; valid for small v0 only
};

AsymptoticPrediction asymptotic_pair_populations(double omega, double v, double v0);

struct MaxTimesResult {
    std::vector<double> times;  // t_1 .. t_n_max
    bool regime_warning;        // set when v0^2 / v > 0.1
};

/// Entropy-maximum times t_{n+1} = [phase + (2n+1) pi]/v0 + v0/v, where
/// phase is the simulated 2*theta1 - theta2 at the third crossing t = v0/v.
MaxTimesResult max_entanglement_times(double phase_at_third_crossing, double v0, double v,
                                      int n_max);

/// Populations in the {gg, s, rr} basis from a pair state of either
/// representation (3-dim amplitudes or 4-dim with |s> projection).
std::array<double, 3> symmetric_populations(const StateVector& psi);
std::array<double, 3> symmetric_populations(const DensityMatrix& rho);

}  // namespace lzsim::dynamics
