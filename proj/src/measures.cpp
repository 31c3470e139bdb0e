#include "lzsim/measures.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lzsim::measures {

using qmath::Complex;
using qmath::Keep;

namespace {

constexpr double kPi = std::numbers::pi;

double binary_entropy_from_x(double x) {
    // Eigenvalues (1 -+ x)/2 of the one-atom density matrix.
    double s = 0.0;
    for (double lam : {0.5 * (1.0 - x), 0.5 * (1.0 + x)}) {
        if (lam > 0.0) s -= lam * std::log2(lam);
    }
    return s;
}

}  // namespace

EntropyBreakdown entanglement_entropy_symmetric(double a_gg, double a_s, double a_rr,
                                                double theta1, double theta2) {
    if (a_gg < 0.0 || a_s < 0.0 || a_rr < 0.0) {
        throw DomainError("entanglement_entropy_symmetric: amplitudes must be non-negative");
    }
    const double n2 = a_gg * a_gg + a_s * a_s + a_rr * a_rr;
    // 1e-4 admits amplitude triples given to five figures; tighter inputs
    // pass through the rescale unchanged.
    if (std::abs(n2 - 1.0) > 1e-4) {
        throw DomainError("entanglement_entropy_symmetric: amplitudes are not normalized");
    }
    const double inv = 1.0 / std::sqrt(n2);
    const double gg = a_gg * inv;
    const double s = a_s * inv;
    const double rr = a_rr * inv;

    const double gg2 = gg * gg;
    const double s2 = s * s;
    const double rr2 = rr * rr;

    EntropyBreakdown out;
    out.a_coeff = (gg2 - rr2) * (gg2 - rr2) + 2.0 * s2 * (gg2 + rr2);
    out.b_coeff = 4.0 * gg * s2 * rr;
    const double x2 = out.a_coeff + out.b_coeff * std::cos(2.0 * theta1 - theta2);
    out.x = std::sqrt(std::clamp(x2, 0.0, 1.0));
    out.lambda1 = 0.5 * (1.0 - out.x);
    out.lambda2 = 0.5 * (1.0 + out.x);
    out.entropy = binary_entropy_from_x(out.x);
    return out;
}

std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw DimensionError("bloch_vector: expected a 2x2 density matrix");
    const Complex off = rho(0, 1);
    return {2.0 * off.real(), -2.0 * off.imag(),
            rho(0, 0).real() - rho(1, 1).real()};
}

namespace {

// Cached sigma_a (x) sigma_b products in the pair basis; index 0 = identity,
// 1..3 = x, y, z.
const ComplexMatrix& two_qubit_pauli(int a, int b) {
    static const std::array<ComplexMatrix, 16> table = [] {
        const ComplexMatrix* sigma[4] = {&qmath::identity2(), &qmath::pauli_x(),
                                         &qmath::pauli_y(), &qmath::pauli_z()};
        std::array<ComplexMatrix, 16> t{
            ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4),
            ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4),
            ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4),
            ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4), ComplexMatrix(4)};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t[4 * i + j] = qmath::kron(*sigma[i], *sigma[j]);
        return t;
    }();
    return table[4 * a + b];
}

double trace_with(const DensityMatrix& rho, const ComplexMatrix& op) {
    Complex acc = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) acc += rho(r, c) * op(c, r);
    return acc.real();
}

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 3; ++c) out[r][c] += a[r][k] * b[k][c];
    return out;
}

Mat3 mat3_transpose(const Mat3& a) {
    Mat3 out{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[r][c] = a[c][r];
    return out;
}

Vec3 mat3_apply(const Mat3& a, const Vec3& v) {
    Vec3 out{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[r] += a[r][c] * v[c];
    return out;
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double trace3(const Mat3& a) { return a[0][0] + a[1][1] + a[2][2]; }

double det3(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

PauliDecomposition pauli_decomposition(const DensityMatrix& rho) {
    if (rho.dim() != 4) {
        throw DimensionError("pauli_decomposition: expected a two-qubit density matrix");
    }
    PauliDecomposition d;
    for (int a = 1; a <= 3; ++a) {
        d.t1[a - 1] = 0.25 * trace_with(rho, two_qubit_pauli(a, 0));
        d.t2[a - 1] = 0.25 * trace_with(rho, two_qubit_pauli(0, a));
        for (int b = 1; b <= 3; ++b) {
            d.t12[a - 1][b - 1] = 0.25 * trace_with(rho, two_qubit_pauli(a, b));
        }
    }
    return d;
}

ComplexMatrix reconstruct(const PauliDecomposition& decomp) {
    ComplexMatrix out = ComplexMatrix::identity(4);
    out *= Complex{0.25, 0.0};
    for (int a = 1; a <= 3; ++a) {
        ComplexMatrix m1 = two_qubit_pauli(a, 0);
        m1 *= Complex{decomp.t1[a - 1], 0.0};
        out += m1;
        ComplexMatrix m2 = two_qubit_pauli(0, a);
        m2 *= Complex{decomp.t2[a - 1], 0.0};
        out += m2;
        for (int b = 1; b <= 3; ++b) {
            ComplexMatrix m12 = two_qubit_pauli(a, b);
            m12 *= Complex{decomp.t12[a - 1][b - 1], 0.0};
            out += m12;
        }
    }
    return out;
}

std::array<double, 13> InvariantSet::flatten() const {
    return {ip_t1[0], ip_t1[1], ip_t1[2], ip_t2[0],   ip_t2[1],  ip_t2[2], ip_cross[0],
            ip_cross[1], ip_cross[2], traces[0], traces[1], traces[2], det_t12};
}

InvariantSet lu_invariants(const DensityMatrix& rho) {
    const PauliDecomposition d = pauli_decomposition(rho);
    const Mat3& t12 = d.t12;
    const Mat3 t12t = mat3_transpose(t12);
    const Mat3 m = mat3_mul(t12, t12t);   // T12 T12^T
    const Mat3 n = mat3_mul(t12t, t12);   // T12^T T12

    InvariantSet inv{};
    const Vec3 t12_t2 = mat3_apply(t12, d.t2);
    Vec3 mv1 = d.t1;        // (T12 T12^T)^b T1
    Vec3 nv2 = d.t2;        // (T12^T T12)^b T2
    Vec3 mcross = t12_t2;   // (T12 T12^T)^b T12 T2
    for (int b = 0; b < 3; ++b) {
        inv.ip_t1[b] = dot3(d.t1, mv1);
        inv.ip_t2[b] = dot3(d.t2, nv2);
        inv.ip_cross[b] = dot3(d.t1, mcross);
        mv1 = mat3_apply(m, mv1);
        nv2 = mat3_apply(n, nv2);
        mcross = mat3_apply(m, mcross);
    }
    Mat3 mp = m;
    for (int a = 0; a < 3; ++a) {
        inv.traces[a] = trace3(mp);
        mp = mat3_mul(mp, m);
    }
    inv.det_t12 = det3(t12);
    return inv;
}

LuComparison lu_equivalent(const DensityMatrix& rho_a, const DensityMatrix& rho_b, double tol) {
    if (!(tol > 0.0)) throw DomainError("lu_equivalent: tol must be positive");
    const auto fa = lu_invariants(rho_a).flatten();
    const auto fb = lu_invariants(rho_b).flatten();
    LuComparison cmp{};
    cmp.max_residual = 0.0;
    for (int i = 0; i < 13; ++i) {
        cmp.residuals[i] = std::abs(fa[i] - fb[i]);
        cmp.max_residual = std::max(cmp.max_residual, cmp.residuals[i]);
    }
    cmp.equivalent = cmp.max_residual <= tol;
    return cmp;
}

namespace {

struct TwoQubitEntropies {
    double s_a;
    double s_b;
    double s_ab;
};

double entropy2_from_matrix(double r00, double r11, const Complex& r01) {
    // Closed form for a trace-1 Hermitian 2x2 matrix.
    const double tr = r00 + r11;
    const double det = r00 * r11 - std::norm(r01);
    const double disc = std::max(tr * tr - 4.0 * det, 0.0);
    const double root = std::sqrt(disc);
    double s = 0.0;
    for (double lam : {0.5 * (tr - root), 0.5 * (tr + root)}) {
        if (lam > 0.0) s -= lam * std::log2(lam);
    }
    return s;
}

// Objective for one measurement direction: S_kept - sum_i p_i S(rho_kept^i).
// The projector pair is P(n) and P(-n); `measured` selects the traced side.
double classical_correlation(const DensityMatrix& rho, MeasuredSide measured, double s_kept,
                             double theta, double phi) {
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);

    double result = s_kept;
    for (int sign : {+1, -1}) {
        // P = (I + sign * n.sigma)/2
        const double pz = sign * nz;
        const Complex pxy = 0.5 * Complex{sign * nx, -sign * ny};  // P(0,1)
        const double p00 = 0.5 * (1.0 + pz);
        const double p11 = 0.5 * (1.0 - pz);

        // Unnormalized post-measurement state of the kept side:
        // out[a][a'] = sum_{c,c'} P(c',c) rho[(a c),(a' c')]   (measured = B)
        // out[b][b'] = sum_{c,c'} P(c',c) rho[(c b),(c' b')]   (measured = A)
        double o00 = 0.0, o11 = 0.0;
        Complex o01 = 0.0;
        const auto element = [&](int a, int c, int ap, int cp) -> const Complex& {
            return (measured == MeasuredSide::B) ? rho(2 * a + c, 2 * ap + cp)
                                                 : rho(2 * c + a, 2 * cp + ap);
        };
        const auto p_entry = [&](int r, int c) -> Complex {
            if (r == 0 && c == 0) return Complex{p00, 0.0};
            if (r == 1 && c == 1) return Complex{p11, 0.0};
            return (r == 0) ? pxy : std::conj(pxy);
        };
        for (int c = 0; c < 2; ++c) {
            for (int cp = 0; cp < 2; ++cp) {
                const Complex w = p_entry(cp, c);
                if (w == Complex{}) continue;
                o00 += (w * element(0, c, 0, cp)).real();
                o11 += (w * element(1, c, 1, cp)).real();
                o01 += w * element(0, c, 1, cp);
            }
        }
        const double p = o00 + o11;
        if (p > 1e-14) {
            result -= p * entropy2_from_matrix(o00 / p, o11 / p, o01 / p);
        }
    }
    return result;
}

}  // namespace

DiscordResult quantum_discord(const DensityMatrix& rho, MeasuredSide measured_side,
                              int grid_n, int refine_iters) {
    if (rho.dim() != 4) throw DimensionError("quantum_discord: expected a two-qubit state");
    if (grid_n < 16) throw DomainError("quantum_discord: grid_n must be >= 16");
    if (refine_iters < 0) throw DomainError("quantum_discord: refine_iters must be >= 0");
    if (rho.min_eigenvalue() < -1e-6) {
        throw ContractViolation("quantum_discord: density matrix is not positive");
    }

    const DensityMatrix rho_a = qmath::partial_trace(rho, Keep::first);
    const DensityMatrix rho_b = qmath::partial_trace(rho, Keep::second);
    const double s_a = qmath::von_neumann_entropy(rho_a, 1e-6);
    const double s_b = qmath::von_neumann_entropy(rho_b, 1e-6);
    const double s_ab = qmath::von_neumann_entropy(rho, 1e-6);

    DiscordResult out;
    out.mutual_info = s_a + s_b - s_ab;

    const double s_kept = (measured_side == MeasuredSide::B) ? s_a : s_b;
    long evals = 0;
    const auto objective = [&](double theta, double phi) {
        ++evals;
        return classical_correlation(rho, measured_side, s_kept, theta, phi);
    };

    // Coarse scan. Theta includes both poles so doubling grid_n refines
    // the grid in place (estimates are monotone in grid_n).
    double best_j = -std::numeric_limits<double>::infinity();
    double best_theta = 0.0, best_phi = 0.0;
    for (int j = 0; j <= grid_n; ++j) {
        const double theta = kPi * j / grid_n;
        for (int k = 0; k < grid_n; ++k) {
            const double phi = 2.0 * kPi * k / grid_n;
            const double val = objective(theta, phi);
            if (val > best_j) {
                best_j = val;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    // Compass-step polish: move while improving, shrink on failure.
    double h = kPi / grid_n;
    for (int it = 0; it < refine_iters; ++it) {
        bool moved = false;
        const double cand[4][2] = {{best_theta + h, best_phi},
                                   {best_theta - h, best_phi},
                                   {best_theta, best_phi + h},
                                   {best_theta, best_phi - h}};
        for (const auto& c : cand) {
            const double theta = std::clamp(c[0], 0.0, kPi);
            const double val = objective(theta, c[1]);
            if (val > best_j) {
                best_j = val;
                best_theta = theta;
                best_phi = c[1];
                moved = true;
            }
        }
        if (!moved) h *= 0.5;
    }

    double d = out.mutual_info - best_j;
    if (d < 0.0 && d >= -1e-6) d = 0.0;  // optimizer undershoot reports as zero
    if (measured_side == MeasuredSide::B) {
        out.discord_ab = d;
        out.has_ab = true;
        out.best_basis_ab = {best_theta, std::remainder(best_phi, 2.0 * kPi)};
    } else {
        out.discord_ba = d;
        out.has_ba = true;
        out.best_basis_ba = {best_theta, std::remainder(best_phi, 2.0 * kPi)};
    }
    out.optimizer_evals = evals;
    return out;
}

DiscordResult quantum_discord_both(const DensityMatrix& rho, int grid_n, int refine_iters) {
    DiscordResult ab = quantum_discord(rho, MeasuredSide::B, grid_n, refine_iters);
    const DiscordResult ba = quantum_discord(rho, MeasuredSide::A, grid_n, refine_iters);
    ab.discord_ba = ba.discord_ba;
    ab.has_ba = true;
    ab.best_basis_ba = ba.best_basis_ba;
    ab.optimizer_evals += ba.optimizer_evals;
    return ab;
}

const std::vector<std::pair<std::string, StateVector>>& bell_states() {
    static const std::vector<std::pair<std::string, StateVector>> states = [] {
        const double r = 1.0 / std::sqrt(2.0);
        std::vector<std::pair<std::string, StateVector>> v;
        v.emplace_back("phi_plus", StateVector(4, {r, 0.0, 0.0, r}));
        v.emplace_back("phi_minus", StateVector(4, {r, 0.0, 0.0, -r}));
        v.emplace_back("psi_plus", StateVector(4, {0.0, r, r, 0.0}));
        v.emplace_back("psi_minus", StateVector(4, {0.0, r, -r, 0.0}));
        return v;
    }();
    return states;
}

}  // namespace lzsim::measures
