#include "lzsim/model.hpp"

#include <cmath>

namespace lzsim::model {

using qmath::Complex;

void SweepSchedule::validate() const {
    if (omega < 0.0 || !std::isfinite(omega)) {
        throw DomainError("SweepSchedule: omega must be non-negative and finite");
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("SweepSchedule: sweep rate v must be positive and finite");
    }
    if (!(delta_start < delta_end)) {
        throw DomainError("SweepSchedule: delta_start must be below delta_end");
    }
    if (v0 < 0.0 || !std::isfinite(v0)) {
        throw DomainError("SweepSchedule: v0 must be non-negative and finite");
    }
}

void DissipationSpec::validate() const {
    if (gamma < 0.0 || !std::isfinite(gamma)) {
        throw DomainError("DissipationSpec: gamma must be non-negative and finite");
    }
}

ComplexMatrix single_atom_hamiltonian(double delta, double omega) {
    ComplexMatrix h(2);
    h(0, 0) = 0.0;
    h(1, 1) = -delta;
    h(0, 1) = 0.5 * omega;
    h(1, 0) = 0.5 * omega;
    return h;
}

ComplexMatrix pair_hamiltonian(double delta, double omega, double v0) {
    ComplexMatrix h(4);
    h(0, 0) = 0.0;
    h(1, 1) = -delta;
    h(2, 2) = -delta;
    h(3, 3) = -2.0 * delta + v0;
    const double g = 0.5 * omega;
    // sigma_x on either atom couples gg<->gr, gg<->rg, gr<->rr, rg<->rr.
    h(0, 1) = g;
    h(1, 0) = g;
    h(0, 2) = g;
    h(2, 0) = g;
    h(1, 3) = g;
    h(3, 1) = g;
    h(2, 3) = g;
    h(3, 2) = g;
    return h;
}

ComplexMatrix pair_hamiltonian_symmetric(double delta, double omega, double v0) {
    ComplexMatrix h(3);
    h(0, 0) = 0.0;
    h(1, 1) = -delta;
    h(2, 2) = -2.0 * delta + v0;
    const double g = omega / std::sqrt(2.0);
    h(0, 1) = g;
    h(1, 0) = g;
    h(1, 2) = g;
    h(2, 1) = g;
    return h;
}

AdiabaticPair adiabatic_states(double delta, double omega) {
    if (!(omega > 0.0)) {
        throw DomainError("adiabatic_states: omega = 0 gives a degenerate gap");
    }
    const double omega_bar = std::sqrt(delta * delta + omega * omega);
    const double beta_plus = (omega_bar + delta) / omega;
    const double beta_minus = (omega_bar - delta) / omega;
    const double norm = std::sqrt(omega / (2.0 * omega_bar));
    const double sp = std::sqrt(beta_plus);
    const double sm = std::sqrt(beta_minus);

    StateVector phi_plus(2, {Complex{norm * sp, 0.0}, Complex{norm * sm, 0.0}});
    StateVector phi_minus(2, {Complex{-norm * sm, 0.0}, Complex{norm * sp, 0.0}});

    return AdiabaticPair{
        0.5 * omega * beta_minus,   // E_+
        -0.5 * omega * beta_plus,   // E_-
        phi_plus,
        phi_minus,
        beta_plus,
        beta_minus,
        omega_bar,
    };
}

std::array<double, 3> crossing_detunings(double v0) {
    if (v0 < 0.0) throw DomainError("crossing_detunings: v0 must be non-negative");
    return {0.0, 0.5 * v0, v0};
}

StateVector embed_symmetric_state(const StateVector& sym) {
    if (sym.dim() != 3) {
        throw DimensionError("embed_symmetric_state: expected a 3-dim symmetric state");
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return StateVector(4, {sym[0], sym[1] * inv_sqrt2, sym[1] * inv_sqrt2, sym[2]});
}

const ComplexMatrix& swap_operator() {
    static const ComplexMatrix s = [] {
        ComplexMatrix m(4);
        m(0, 0) = 1.0;
        m(1, 2) = 1.0;
        m(2, 1) = 1.0;
        m(3, 3) = 1.0;
        return m;
    }();
    return s;
}

}  // namespace lzsim::model
