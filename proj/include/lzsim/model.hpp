#pragma once

#include <array>

#include "lzsim/qmath.hpp"

namespace lzsim::model {

using qmath::ComplexMatrix;
using qmath::StateVector;

/// Linear-sweep drive parameters. Omega sets the unit of energy (1 by
/// convention); time is chosen so the detuning crosses zero at t = 0,
/// i.e. delta(t) = v * t on t in [delta_start/v, delta_end/v].
struct SweepSchedule {
    double omega = 1.0;
    double v = 1.0;             // sweep rate, units omega^2
    double delta_start = -100.0;
    double delta_end = 100.0;
    double v0 = 0.0;            // interaction strength, units omega (pair only)

    void validate() const;
    double t_start() const { return delta_start / v; }
    double t_end() const { return delta_end / v; }
    double delta_at(double t) const { return v * t; }
};

/// Instantaneous eigensystem of the two-level Hamiltonian.
struct AdiabaticPair {
    double e_plus;
    double e_minus;
    StateVector phi_plus;
    StateVector phi_minus;
    double beta_plus;
    double beta_minus;
    double omega_bar;
};

struct DissipationSpec {
    double gamma = 0.0;  // spontaneous decay rate, units omega

    void validate() const;
};

/// H = -delta |r><r| + (omega/2) sigma_x in the basis {|g>, |r>}.
ComplexMatrix single_atom_hamiltonian(double delta, double omega);

/// Two-atom Hamiltonian in the full basis {gg, gr, rg, rr}:
/// H = -delta sum_i sigma_rr^i + (omega/2) sum_i sigma_x^i + v0 sigma_rr^1 sigma_rr^2.
ComplexMatrix pair_hamiltonian(double delta, double omega, double v0);

/// Projection of the pair Hamiltonian onto {gg, s, rr} with
/// |s> = (|gr> + |rg>)/sqrt(2); the antisymmetric state decouples.
ComplexMatrix pair_hamiltonian_symmetric(double delta, double omega, double v0);

/// Eigensystem of the two-level Hamiltonian in closed form:
/// E_+- = +-(omega/2) beta_-+ with beta_+- = (omega_bar +- delta)/omega.
AdiabaticPair adiabatic_states(double delta, double omega);

/// Detunings of the three diabatic degeneracies: gg-s at 0,
/// gg-rr at v0/2, s-rr at v0.
std::array<double, 3> crossing_detunings(double v0);

/// Embed a {gg, s, rr} state into the full 4-dim basis.
StateVector embed_symmetric_state(const StateVector& sym);

/// Atom-exchange permutation on the full pair basis (swaps gr and rg).
const ComplexMatrix& swap_operator();

}  // namespace lzsim::model
