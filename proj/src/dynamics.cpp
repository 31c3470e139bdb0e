#include "lzsim/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace lzsim::dynamics {

using qmath::Complex;
using qmath::ComplexMatrix;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNormAbortTol = 1e-6;   // per-step drift that aborts the run
constexpr double kPositivityTol = 1e-6;  // Lindblad min-eigenvalue monitor
constexpr double kPhaseRefTol = 1e-6;    // reference amplitude below which phases are undefined

int mode_dim(PropagationMode mode) {
    switch (mode) {
        case PropagationMode::single: return 2;
        case PropagationMode::pair_symmetric: return 3;
        default: return 4;
    }
}

// Hamiltonian in the traceless gauge. The shift is a global phase only,
// but it halves the largest eigenvalue magnitude at |delta| ~ 100 omega,
// which is what keeps RK4 norm drift below 1e-8 per step at dt = 1e-3.
ComplexMatrix gauge_hamiltonian(PropagationMode mode, double delta, double omega, double v0) {
    ComplexMatrix h = [&] {
        switch (mode) {
            case PropagationMode::single: return model::single_atom_hamiltonian(delta, omega);
            case PropagationMode::pair_symmetric:
                return model::pair_hamiltonian_symmetric(delta, omega, v0);
            default: return model::pair_hamiltonian(delta, omega, v0);
        }
    }();
    const double shift = h.trace().real() / h.dim();
    for (int i = 0; i < h.dim(); ++i) h(i, i) -= shift;
    return h;
}

using Vec = std::array<Complex, 4>;

// out = -i H y
void schrodinger_rhs(const ComplexMatrix& h, const Vec& y, Vec& out, int dim) {
    for (int r = 0; r < dim; ++r) {
        Complex acc = 0.0;
        for (int c = 0; c < dim; ++c) acc += h(r, c) * y[c];
        out[r] = Complex{acc.imag(), -acc.real()};  // multiply by -i
    }
}

struct SnapshotSink {
    Trajectory* traj;
    int stride;
    long last_recorded = -1;

    void operator()(long step, double t, const Vec& y, int dim) {
        if (step == last_recorded) return;
        last_recorded = step;
        traj->times.push_back(t);
        std::vector<Complex> amps(y.begin(), y.begin() + dim);
        traj->states.emplace_back(dim, amps);
        std::array<double, 4> pops{};
        for (int i = 0; i < dim; ++i) pops[i] = std::norm(y[i]);
        traj->populations.push_back(pops);
    }
};

}  // namespace

Trajectory propagate_schrodinger(const StateVector& psi0, const SweepSchedule& schedule,
                                 double dt, PropagationMode mode, int output_stride,
                                 double hold_time) {
    schedule.validate();
    if (!(dt > 0.0)) throw DomainError("propagate_schrodinger: dt must be positive");
    if (output_stride < 1) throw DomainError("propagate_schrodinger: stride must be >= 1");
    if (hold_time < 0.0) throw DomainError("propagate_schrodinger: hold_time must be >= 0");
    const int dim = mode_dim(mode);
    if (psi0.dim() != dim) {
        throw DimensionError("propagate_schrodinger: psi0 dimension does not match mode");
    }

    Trajectory traj;
    traj.mode = mode;
    traj.dissipative = false;
    traj.dt = dt;
    traj.stride = output_stride;

    Vec y{};
    for (int i = 0; i < dim; ++i) y[i] = psi0[i];

    SnapshotSink record{&traj, output_stride};

    const double t_sweep_end = schedule.t_end();
    double t = schedule.t_start();
    long step = 0;
    record(step, t, y, dim);

    Vec k1, k2, k3, k4, tmp;
    const auto run_segment = [&](double t_to, bool hold) {
        while (t < t_to - 1e-12 * std::max(1.0, std::abs(t_to))) {
            const double h = std::min(dt, t_to - t);
            const double d0 = hold ? schedule.delta_end : schedule.delta_at(t);
            const double dm = hold ? schedule.delta_end : schedule.delta_at(t + 0.5 * h);
            const double d1 = hold ? schedule.delta_end : schedule.delta_at(t + h);
            const ComplexMatrix h0 = gauge_hamiltonian(mode, d0, schedule.omega, schedule.v0);
            const ComplexMatrix hm = gauge_hamiltonian(mode, dm, schedule.omega, schedule.v0);
            const ComplexMatrix h1 = gauge_hamiltonian(mode, d1, schedule.omega, schedule.v0);

            schrodinger_rhs(h0, y, k1, dim);
            for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
            schrodinger_rhs(hm, tmp, k2, dim);
            for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
            schrodinger_rhs(hm, tmp, k3, dim);
            for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
            schrodinger_rhs(h1, tmp, k4, dim);
            for (int i = 0; i < dim; ++i) {
                y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }

            double n2 = 0.0;
            for (int i = 0; i < dim; ++i) n2 += std::norm(y[i]);
            const double norm = std::sqrt(n2);
            const double drift = std::abs(norm - 1.0);
            if (!(drift <= kNormAbortTol)) {  // also catches NaN from a blown-up step
                throw StepSizeError(
                    "propagate_schrodinger: norm drift " + std::to_string(drift) +
                    " exceeds 1e-6 in one step; reduce dt");
            }
            traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
            for (int i = 0; i < dim; ++i) y[i] /= norm;

            t += h;
            ++step;
            if (step % output_stride == 0) record(step, t, y, dim);
        }
        t = t_to;
    };

    run_segment(t_sweep_end, false);
    if (hold_time > 0.0) run_segment(t_sweep_end + hold_time, true);
    record(step, t, y, dim);

    return traj;
}

namespace {

using Mat = std::array<Complex, 16>;

inline Complex& at(Mat& m, int r, int c) { return m[4 * r + c]; }
inline const Complex& at(const Mat& m, int r, int c) { return m[4 * r + c]; }

// drho = -i[H, rho] + gamma * (jump terms - {N, rho}/2), with per-atom decay
// |g><r|. In the basis {gg, gr, rg, rr} the jump operators lower index 2 -> 0,
// 3 -> 1 (atom 1) and 1 -> 0, 3 -> 2 (atom 2); N counts excitations.
void lindblad_rhs(const ComplexMatrix& h, double gamma, const Mat& rho, Mat& out) {
    // commutator part
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            Complex acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                acc += h(r, k) * at(rho, k, c) - at(rho, r, k) * h(k, c);
            }
            at(out, r, c) = Complex{acc.imag(), -acc.real()};
        }
    }
    if (gamma == 0.0) return;

    static constexpr double n_exc[4] = {0.0, 1.0, 1.0, 2.0};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            at(out, r, c) -= 0.5 * gamma * (n_exc[r] + n_exc[c]) * at(rho, r, c);
        }
    }
    // atom 1: C rho C^+ lands on rows/cols {0, 1} from {2, 3}
    at(out, 0, 0) += gamma * at(rho, 2, 2);
    at(out, 0, 1) += gamma * at(rho, 2, 3);
    at(out, 1, 0) += gamma * at(rho, 3, 2);
    at(out, 1, 1) += gamma * at(rho, 3, 3);
    // atom 2: rows/cols {0, 2} from {1, 3}
    at(out, 0, 0) += gamma * at(rho, 1, 1);
    at(out, 0, 2) += gamma * at(rho, 1, 3);
    at(out, 2, 0) += gamma * at(rho, 3, 1);
    at(out, 2, 2) += gamma * at(rho, 3, 3);
}

}  // namespace

Trajectory propagate_lindblad(const DensityMatrix& rho0, const SweepSchedule& schedule,
                              const DissipationSpec& dissipation, double dt,
                              int output_stride, double hold_time) {
    schedule.validate();
    dissipation.validate();
    if (!(dt > 0.0)) throw DomainError("propagate_lindblad: dt must be positive");
    if (output_stride < 1) throw DomainError("propagate_lindblad: stride must be >= 1");
    if (hold_time < 0.0) throw DomainError("propagate_lindblad: hold_time must be >= 0");
    if (rho0.dim() != 4) throw DimensionError("propagate_lindblad: rho0 must be 4x4");

    Trajectory traj;
    traj.mode = PropagationMode::pair_full;
    traj.dissipative = true;
    traj.dt = dt;
    traj.stride = output_stride;
    traj.min_eigenvalue = 1.0;

    Mat rho{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) at(rho, r, c) = rho0(r, c);

    const double gamma = dissipation.gamma;
    long last_recorded = -1;

    const auto record = [&](long step, double t) {
        if (step == last_recorded) return;
        last_recorded = step;
        ComplexMatrix m(4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = at(rho, r, c);
        DensityMatrix snapshot(m);
        const double min_eig = snapshot.min_eigenvalue();
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, min_eig);
        if (min_eig < -kPositivityTol) {
            throw StepSizeError("propagate_lindblad: eigenvalue " + std::to_string(min_eig) +
                                " violates positivity; reduce dt");
        }
        traj.times.push_back(t);
        std::array<double, 4> pops{};
        for (int i = 0; i < 4; ++i) pops[i] = at(rho, i, i).real();
        traj.populations.push_back(pops);
        traj.rhos.push_back(std::move(snapshot));
    };

    const double t_sweep_end = schedule.t_end();
    double t = schedule.t_start();
    long step = 0;
    record(step, t);

    Mat k1, k2, k3, k4, tmp;
    const auto run_segment = [&](double t_to, bool hold) {
        while (t < t_to - 1e-12 * std::max(1.0, std::abs(t_to))) {
            const double h = std::min(dt, t_to - t);
            const double d0 = hold ? schedule.delta_end : schedule.delta_at(t);
            const double dm = hold ? schedule.delta_end : schedule.delta_at(t + 0.5 * h);
            const double d1 = hold ? schedule.delta_end : schedule.delta_at(t + h);
            const ComplexMatrix h0 =
                gauge_hamiltonian(PropagationMode::pair_full, d0, schedule.omega, schedule.v0);
            const ComplexMatrix hm =
                gauge_hamiltonian(PropagationMode::pair_full, dm, schedule.omega, schedule.v0);
            const ComplexMatrix h1 =
                gauge_hamiltonian(PropagationMode::pair_full, d1, schedule.omega, schedule.v0);

            lindblad_rhs(h0, gamma, rho, k1);
            for (int i = 0; i < 16; ++i) tmp[i] = rho[i] + 0.5 * h * k1[i];
            lindblad_rhs(hm, gamma, tmp, k2);
            for (int i = 0; i < 16; ++i) tmp[i] = rho[i] + 0.5 * h * k2[i];
            lindblad_rhs(hm, gamma, tmp, k3);
            for (int i = 0; i < 16; ++i) tmp[i] = rho[i] + h * k3[i];
            lindblad_rhs(h1, gamma, tmp, k4);
            for (int i = 0; i < 16; ++i) {
                rho[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }

            // enforce Hermiticity, then rescale the trace
            for (int r = 0; r < 4; ++r) {
                at(rho, r, r) = Complex{at(rho, r, r).real(), 0.0};
                for (int c = r + 1; c < 4; ++c) {
                    const Complex avg = 0.5 * (at(rho, r, c) + std::conj(at(rho, c, r)));
                    at(rho, r, c) = avg;
                    at(rho, c, r) = std::conj(avg);
                }
            }
            double tr = 0.0;
            for (int i = 0; i < 4; ++i) tr += at(rho, i, i).real();
            const double drift = std::abs(tr - 1.0);
            if (!(drift <= kNormAbortTol)) {  // also catches NaN from a blown-up step
                throw StepSizeError("propagate_lindblad: trace drift " + std::to_string(drift) +
                                    " exceeds 1e-6 in one step; reduce dt");
            }
            traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
            for (int i = 0; i < 16; ++i) rho[i] /= tr;

            t += h;
            ++step;
            if (step % output_stride == 0) record(step, t);
        }
        t = t_to;
    };

    run_segment(t_sweep_end, false);
    if (hold_time > 0.0) run_segment(t_sweep_end + hold_time, true);
    record(step, t);

    return traj;
}

namespace {

// Fold delta into (-pi, pi].
double fold_angle(double delta) {
    double out = std::remainder(delta, 2.0 * kPi);
    if (out <= -kPi) out += 2.0 * kPi;
    return out;
}

struct Unwrapper {
    bool seeded = false;
    double last = 0.0;

    double feed(double raw) {
        if (!seeded) {
            seeded = true;
            last = fold_angle(raw);
            return last;
        }
        last += fold_angle(raw - last);
        return last;
    }
    // Re-seed after a gap: keep the accumulated 2*pi offset.
    double bridge(double raw) {
        if (!seeded) return feed(raw);
        const double k = std::round((last - raw) / (2.0 * kPi));
        last = raw + 2.0 * kPi * k;
        return last;
    }
};

}  // namespace

Trajectory& relative_phases(Trajectory& traj) {
    if (traj.dissipative) {
        throw DomainError("relative_phases: defined for coherent trajectories only");
    }
    const std::size_t n = traj.size();
    traj.phase_ok.assign(n, 1);

    if (traj.mode == PropagationMode::single) {
        traj.phi_single.assign(n, 0.0);
        Unwrapper u;
        bool in_gap = false;
        for (std::size_t i = 0; i < n; ++i) {
            const StateVector& psi = traj.states[i];
            if (std::abs(psi[0]) < kPhaseRefTol) {
                traj.phase_ok[i] = 0;
                traj.phi_single[i] = u.last;
                in_gap = true;
                continue;
            }
            const double raw = std::arg(psi[1]) - std::arg(psi[0]);
            traj.phi_single[i] = in_gap ? u.bridge(raw) : u.feed(raw);
            in_gap = false;
        }
        return traj;
    }

    traj.theta1.assign(n, 0.0);
    traj.theta2.assign(n, 0.0);
    Unwrapper u1, u2;
    bool in_gap = false;
    for (std::size_t i = 0; i < n; ++i) {
        const StateVector& psi = traj.states[i];
        const Complex a_gg = psi[0];
        const Complex a_s = (traj.mode == PropagationMode::pair_symmetric)
                                ? psi[1]
                                : (psi[1] + psi[2]) / std::sqrt(2.0);
        const Complex a_rr = (traj.mode == PropagationMode::pair_symmetric) ? psi[2] : psi[3];
        if (std::abs(a_gg) < kPhaseRefTol) {
            traj.phase_ok[i] = 0;
            traj.theta1[i] = u1.last;
            traj.theta2[i] = u2.last;
            in_gap = true;
            continue;
        }
        const double ref = std::arg(a_gg);
        const double raw1 = std::arg(a_s) - ref;
        const double raw2 = std::arg(a_rr) - ref;
        traj.theta1[i] = in_gap ? u1.bridge(raw1) : u1.feed(raw1);
        traj.theta2[i] = in_gap ? u2.bridge(raw2) : u2.feed(raw2);
        in_gap = false;
    }
    return traj;
}

double lz_probability(double omega, double v) {
    if (!(v > 0.0)) throw DomainError("lz_probability: sweep rate v must be positive");
    return std::exp(-kPi * omega * omega / (2.0 * v));
}

AsymptoticPrediction asymptotic_pair_populations(double omega, double v, double v0) {
    if (!(v > 0.0)) throw DomainError("asymptotic_pair_populations: v must be positive");
    if (v0 < 0.0) throw DomainError("asymptotic_pair_populations: v0 must be non-negative");
    const double p_lz = lz_probability(omega, v);
    const double q_lz = p_lz * std::exp(-kPi * omega * omega * v0 / (4.0 * std::pow(v, 1.5)));
    return AsymptoticPrediction{p_lz, q_lz, p_lz * p_lz, 1.0 - q_lz * q_lz};
}

MaxTimesResult max_entanglement_times(double phase_at_third_crossing, double v0, double v,
                                      int n_max) {
    if (!(v0 > 0.0)) {
        throw DomainError("max_entanglement_times: v0 = 0 makes the period degenerate");
    }
    if (!(v > 0.0)) throw DomainError("max_entanglement_times: v must be positive");
    if (n_max < 1) throw DomainError("max_entanglement_times: n_max must be >= 1");

    MaxTimesResult result;
    result.regime_warning = (v0 * v0 / v) > 0.1;
    result.times.reserve(n_max);
    // The phase enters modulo 2*pi (the maxima repeat with that period);
    // folding it makes t_1 the first maximum after the crossing.
    const double phase = fold_angle(phase_at_third_crossing);
    const double t3 = v0 / v;
    for (int n = 0; n < n_max; ++n) {
        result.times.push_back((phase + (2 * n + 1) * kPi) / v0 + t3);
    }
    return result;
}

std::array<double, 3> symmetric_populations(const StateVector& psi) {
    if (psi.dim() == 3) {
        return {psi.population(0), psi.population(1), psi.population(2)};
    }
    if (psi.dim() == 4) {
        const Complex a_s = (psi[1] + psi[2]) / std::sqrt(2.0);
        return {psi.population(0), std::norm(a_s), psi.population(3)};
    }
    throw DimensionError("symmetric_populations: expected a pair state");
}

std::array<double, 3> symmetric_populations(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("symmetric_populations: expected a 4x4 rho");
    const double p_s = 0.5 * (rho(1, 1).real() + rho(2, 2).real() + 2.0 * rho(1, 2).real());
    return {rho(0, 0).real(), p_s, rho(3, 3).real()};
}

}  // namespace lzsim::dynamics
