#include "lzsim/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lzsim::qmath {

namespace {

void check_dim(int dim, int lo, int hi, const char* who) {
    if (dim < lo || dim > hi) {
        throw DimensionError(std::string(who) + ": unsupported dimension " +
                             std::to_string(dim));
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
    check_dim(dim, 2, 4, "ComplexMatrix");
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw DimensionError("matrix add: dimension mismatch");
    for (int i = 0; i < dim_ * dim_; ++i) m_[i] += rhs.m_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw DimensionError("matrix sub: dimension mismatch");
    for (int i = 0; i < dim_ * dim_; ++i) m_[i] -= rhs.m_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (int i = 0; i < dim_ * dim_; ++i) m_[i] *= scale;
    return *this;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_ * dim_; ++i) s += std::norm(m_[i]);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double s = 0.0;
    for (int i = 0; i < dim_ * dim_; ++i) s = std::max(s, std::abs(m_[i]));
    return s;
}

double ComplexMatrix::hermiticity_defect() const {
    double d = 0.0;
    for (int r = 0; r < dim_; ++r)
        for (int c = r; c < dim_; ++c)
            d = std::max(d, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return d;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("matrix mul: dimension mismatch");
    const int n = a.dim();
    ComplexMatrix out(n);
    for (int r = 0; r < n; ++r) {
        for (int k = 0; k < n; ++k) {
            const Complex ark = a(r, k);
            if (ark == Complex{}) continue;
            for (int c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
        }
    }
    return out;
}

ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex{s, 0.0}; }

StateVector::StateVector(int dim, const std::vector<Complex>& amplitudes) : dim_(dim) {
    check_dim(dim, 2, 4, "StateVector");
    if (static_cast<int>(amplitudes.size()) != dim) {
        throw DimensionError("StateVector: amplitude count does not match dim");
    }
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i) n2 += std::norm(amplitudes[i]);
    if (!(n2 > 1e-24)) throw DomainError("StateVector: vector has (near-)zero norm");
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < dim; ++i) a_[i] = amplitudes[i] * inv;
}

StateVector StateVector::basis_state(int dim, int index) {
    check_dim(dim, 2, 4, "StateVector");
    if (index < 0 || index >= dim) throw DimensionError("basis_state: index out of range");
    std::vector<Complex> a(dim, Complex{});
    a[index] = 1.0;
    return StateVector(dim, a);
}

Complex StateVector::inner(const StateVector& other) const {
    if (other.dim_ != dim_) throw DimensionError("inner: dimension mismatch");
    Complex s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::conj(a_[i]) * other.a_[i];
    return s;
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m, double hermitian_tol, double trace_tol)
    : m_(m) {
    const int d = m.dim();
    if (d != 2 && d != 4) throw DimensionError("DensityMatrix: dim must be 2 or 4");
    if (!(m.hermiticity_defect() <= hermitian_tol)) {
        throw ContractViolation("DensityMatrix: input is not Hermitian within tolerance");
    }
    const Complex tr = m.trace();
    if (!(std::abs(tr - 1.0) <= trace_tol)) {
        throw ContractViolation("DensityMatrix: trace deviates from 1 beyond tolerance");
    }
    // Symmetrize and rescale so downstream code can rely on the invariants exactly.
    for (int r = 0; r < d; ++r) {
        m_(r, r) = Complex{m_(r, r).real(), 0.0};
        for (int c = r + 1; c < d; ++c) {
            const Complex avg = 0.5 * (m_(r, c) + std::conj(m_(c, r)));
            m_(r, c) = avg;
            m_(c, r) = std::conj(avg);
        }
    }
    const double scale = 1.0 / m_.trace().real();
    m_ *= Complex{scale, 0.0};
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    const int d = psi.dim();
    if (d != 2 && d != 4) throw DimensionError("DensityMatrix::pure: dim must be 2 or 4");
    ComplexMatrix m(d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = psi[r] * std::conj(psi[c]);
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m *= Complex{1.0 / dim, 0.0};
    return DensityMatrix(m);
}

double DensityMatrix::min_eigenvalue() const {
    const EigenSystem es = hermitian_eigensystem(m_);
    return es.eigenvalues.front();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != 2 || b.dim() != 2) throw DimensionError("kron: factors must be 2x2");
    ComplexMatrix out(4);
    for (int ar = 0; ar < 2; ++ar)
        for (int ac = 0; ac < 2; ++ac)
            for (int br = 0; br < 2; ++br)
                for (int bc = 0; bc < 2; ++bc)
                    out(2 * ar + br, 2 * ac + bc) = a(ar, ac) * b(br, bc);
    return out;
}

namespace {

// Phase-fix each column so its largest-magnitude component is real positive;
// ties resolve to the first such component.
void fix_column_phases(ComplexMatrix& v) {
    const int n = v.dim();
    for (int c = 0; c < n; ++c) {
        int imax = 0;
        double amax = -1.0;
        for (int r = 0; r < n; ++r) {
            const double a = std::abs(v(r, c));
            if (a > amax + 1e-15) {
                amax = a;
                imax = r;
            }
        }
        const Complex z = v(imax, c);
        if (std::abs(z) > 0.0) {
            const Complex phase = std::conj(z) / std::abs(z);
            for (int r = 0; r < n; ++r) v(r, c) *= phase;
        }
    }
}

void sort_ascending(std::vector<double>& vals, ComplexMatrix& vecs) {
    const int n = vecs.dim();
    std::array<int, 4> order{};
    std::iota(order.begin(), order.begin() + n, 0);
    std::stable_sort(order.begin(), order.begin() + n,
                     [&](int i, int j) { return vals[i] < vals[j]; });
    std::vector<double> sv(n);
    ComplexMatrix sm(n);
    for (int c = 0; c < n; ++c) {
        sv[c] = vals[order[c]];
        for (int r = 0; r < n; ++r) sm(r, c) = vecs(r, order[c]);
    }
    vals = std::move(sv);
    vecs = sm;
}

EigenSystem eig2(const ComplexMatrix& h) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const Complex b = h(0, 1);
    const double hb = std::abs(b);
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), hb);
    const double lo = mean - rad;
    const double hi = mean + rad;

    ComplexMatrix v = ComplexMatrix::identity(2);
    if (hb > 0.0) {
        // Eigenvector for the eigenvalue farther from a; the companion
        // column follows by orthogonality (robust near degeneracy).
        const double lam = (std::abs(lo - a) >= std::abs(hi - a)) ? lo : hi;
        Complex v0 = b;
        Complex v1 = Complex{lam - a, 0.0};
        const double n = std::sqrt(std::norm(v0) + std::norm(v1));
        v0 /= n;
        v1 /= n;
        if (lam == lo) {
            v(0, 0) = v0;
            v(1, 0) = v1;
            v(0, 1) = -std::conj(v1);
            v(1, 1) = std::conj(v0);
        } else {
            v(0, 1) = v0;
            v(1, 1) = v1;
            v(0, 0) = -std::conj(v1);
            v(1, 0) = std::conj(v0);
        }
    } else if (a > d) {
        v(0, 0) = 0.0;
        v(1, 0) = 1.0;
        v(0, 1) = 1.0;
        v(1, 1) = 0.0;
    }

    EigenSystem es{{lo, hi}, v};
    fix_column_phases(es.eigenvectors);
    return es;
}

// Cyclic Jacobi for complex Hermitian matrices of dim 3/4.
EigenSystem eig_jacobi(const ComplexMatrix& h) {
    const int n = h.dim();
    ComplexMatrix a = h;
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(a.frobenius_norm(), 1e-300);

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-15 * scale) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-18 * scale) continue;

                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Smaller root of t^2 - 2*tau*t - 1 = 0 keeps the rotation angle
                // under 45 degrees.
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? -1.0 : 1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex phase = apq / mag;

                // Columns: col_p' = c*col_p + s*conj(phase)*col_q,
                //          col_q' = -s*phase*col_p + c*col_q.
                for (int r = 0; r < n; ++r) {
                    const Complex arp = a(r, p);
                    const Complex arq = a(r, q);
                    a(r, p) = c * arp + s * std::conj(phase) * arq;
                    a(r, q) = -s * phase * arp + c * arq;
                }
                for (int col = 0; col < n; ++col) {
                    const Complex apc = a(p, col);
                    const Complex aqc = a(q, col);
                    a(p, col) = c * apc + s * phase * aqc;
                    a(q, col) = -s * std::conj(phase) * apc + c * aqc;
                }
                for (int r = 0; r < n; ++r) {
                    const Complex vrp = v(r, p);
                    const Complex vrq = v(r, q);
                    v(r, p) = c * vrp + s * std::conj(phase) * vrq;
                    v(r, q) = -s * phase * vrp + c * vrq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = Complex{a(p, p).real(), 0.0};
                a(q, q) = Complex{a(q, q).real(), 0.0};
            }
        }
    }

    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = a(i, i).real();
    EigenSystem es{std::move(vals), v};
    sort_ascending(es.eigenvalues, es.eigenvectors);
    fix_column_phases(es.eigenvectors);
    return es;
}

}  // namespace

EigenSystem hermitian_eigensystem(const ComplexMatrix& h) {
    if (h.hermiticity_defect() > 1e-10) {
        throw ContractViolation("hermitian_eigensystem: input is not Hermitian");
    }
    return h.dim() == 2 ? eig2(h) : eig_jacobi(h);
}

DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep) {
    if (rho.dim() != 4) throw DimensionError("partial_trace: density matrix must be 4x4");
    ComplexMatrix out(2);
    // Composite index (a, b) -> 2a + b; a = first atom, b = second.
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Complex s = 0.0;
            for (int k = 0; k < 2; ++k) {
                s += (keep == Keep::first) ? rho(2 * i + k, 2 * j + k)
                                           : rho(2 * k + i, 2 * k + j);
            }
            out(i, j) = s;
        }
    }
    return DensityMatrix(out);
}

double von_neumann_entropy(const DensityMatrix& rho, double negative_tol) {
    const EigenSystem es = hermitian_eigensystem(rho.matrix());
    double s = 0.0;
    for (double lam : es.eigenvalues) {
        if (lam < -negative_tol) {
            throw ContractViolation("von_neumann_entropy: eigenvalue " +
                                    std::to_string(lam) + " below -tolerance");
        }
        if (lam <= 0.0) continue;  // clip round-off negatives and exact zeros
        s -= lam * std::log2(lam);
    }
    return s;
}

namespace {

ComplexMatrix make_pauli(int which) {
    ComplexMatrix m(2);
    switch (which) {
        case 0:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case 1:
            m(0, 1) = Complex{0.0, -1.0};
            m(1, 0) = Complex{0.0, 1.0};
            break;
        case 2:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        default:
            m = ComplexMatrix::identity(2);
    }
    return m;
}

}  // namespace

const ComplexMatrix& pauli_x() {
    static const ComplexMatrix m = make_pauli(0);
    return m;
}

const ComplexMatrix& pauli_y() {
    static const ComplexMatrix m = make_pauli(1);
    return m;
}

const ComplexMatrix& pauli_z() {
    static const ComplexMatrix m = make_pauli(2);
    return m;
}

const ComplexMatrix& identity2() {
    static const ComplexMatrix m = ComplexMatrix::identity(2);
    return m;
}

}  // namespace lzsim::qmath
