#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "lzsim/qmath.hpp"

namespace lzsim::measures {

using qmath::ComplexMatrix;
using qmath::DensityMatrix;
using qmath::StateVector;

/// Closed-form one-atom entropy of the symmetric pure state
/// a_gg|gg> + a_s e^{i theta1}|s> + a_rr e^{i theta2}|rr>.
struct EntropyBreakdown {
    double a_coeff;   // (a_gg^2 - a_rr^2)^2 + 2 a_s^2 (a_gg^2 + a_rr^2)
    double b_coeff;   // 4 a_gg a_s^2 a_rr
    double x;         // sqrt(A + B cos(2 theta1 - theta2))
    double lambda1;   // (1 - x)/2
    double lambda2;   // (1 + x)/2
    double entropy;   // bits
};

/// Amplitudes must be non-negative with a_gg^2 + a_s^2 + a_rr^2 = 1 within
/// 1e-4 (rescaled internally); only the combination 2 theta1 - theta2 matters.
EntropyBreakdown entanglement_entropy_symmetric(double a_gg, double a_s, double a_rr,
                                                double theta1, double theta2);

/// (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z) of a one-atom state.
std::array<double, 3> bloch_vector(const DensityMatrix& rho);

/// Coefficients of rho = I/4 + sum_j T_j^a sigma_a^(j) + sum T_12^{ab}
/// sigma_a^(1) sigma_b^(2), all with the 1/4 normalization
/// T = Tr(rho sigma...)/4.
struct PauliDecomposition {
    std::array<double, 3> t1;
    std::array<double, 3> t2;
    std::array<std::array<double, 3>, 3> t12;
};

PauliDecomposition pauli_decomposition(const DensityMatrix& rho);

/// Rebuild the density matrix from its Pauli coefficients.
ComplexMatrix reconstruct(const PauliDecomposition& decomp);

/// The 13 polynomial invariants whose joint equality decides two-qubit
/// local-unitary equivalence.
struct InvariantSet {
    std::array<double, 3> ip_t1;     // <T1, (T12 T12^T)^b T1>, b = 0, 1, 2
    std::array<double, 3> ip_t2;     // <T2, (T12^T T12)^b T2>
    std::array<double, 3> ip_cross;  // <T1, (T12 T12^T)^b T12 T2>
    std::array<double, 3> traces;    // Tr (T12 T12^T)^a, a = 1, 2, 3
    double det_t12;

    std::array<double, 13> flatten() const;
};

InvariantSet lu_invariants(const DensityMatrix& rho);

struct LuComparison {
    bool equivalent;
    std::array<double, 13> residuals;
    double max_residual;
};

/// True iff every invariant residual |a_i - b_i| is within tol.
LuComparison lu_equivalent(const DensityMatrix& rho_a, const DensityMatrix& rho_b, double tol);

/// Side the projective measurement acts on. Measuring B yields D(A:B),
/// measuring A yields D(B:A).
enum class MeasuredSide { A, B };

struct MeasurementBasis {
    double theta = 0.0;  // polar angle of the Bloch direction
    double phi = 0.0;    // azimuth
};

struct DiscordResult {
    double mutual_info = 0.0;
    double discord_ab = 0.0;
    double discord_ba = 0.0;
    bool has_ab = false;
    bool has_ba = false;
    MeasurementBasis best_basis_ab;
    MeasurementBasis best_basis_ba;
    long optimizer_evals = 0;
};

/// Quantum discord via rank-1 projective measurements: a grid_n x grid_n
/// scan over Bloch directions followed by refine_iters rounds of
/// compass-step shrinking search. Deterministic.
DiscordResult quantum_discord(const DensityMatrix& rho, MeasuredSide measured_side,
                              int grid_n = 64, int refine_iters = 40);

/// Both directions at once (shared mutual information).
DiscordResult quantum_discord_both(const DensityMatrix& rho, int grid_n = 64,
                                   int refine_iters = 40);

/// The four Bell states in the pair basis {gg, gr, rg, rr}.
const std::vector<std::pair<std::string, StateVector>>& bell_states();

}  // namespace lzsim::measures
