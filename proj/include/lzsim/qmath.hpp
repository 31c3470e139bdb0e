#pragma once

#include <array>
#include <complex>
#include <vector>

#include "lzsim/errors.hpp"

namespace lzsim::qmath {

using Complex = std::complex<double>;

inline constexpr Complex kImag{0.0, 1.0};

/// Dense complex matrix for Hilbert-space dimensions 2..4.
/// Fixed inline storage, value semantics; all operations are pure.
class ComplexMatrix {
public:
    explicit ComplexMatrix(int dim);
    static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }
    static ComplexMatrix identity(int dim);

    int dim() const { return dim_; }

    Complex& operator()(int row, int col) { return m_[row * dim_ + col]; }
    const Complex& operator()(int row, int col) const { return m_[row * dim_ + col]; }

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(Complex scale);

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    /// max |a(i,j) - conj(a(j,i))| over all entry pairs.
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-10) const { return hermiticity_defect() <= tol; }

private:
    int dim_;
    std::array<Complex, 16> m_{};
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(double s, ComplexMatrix a);

/// Normalized complex amplitude vector over a diabatic basis (dim 2, 3 or 4).
/// The constructor rescales to unit norm; a near-zero vector is rejected.
class StateVector {
public:
    StateVector(int dim, const std::vector<Complex>& amplitudes);
    static StateVector basis_state(int dim, int index);

    int dim() const { return dim_; }
    const Complex& operator[](int i) const { return a_[i]; }

    double population(int i) const { return std::norm(a_[i]); }
    Complex inner(const StateVector& other) const;  // <this|other>

private:
    StateVector() : dim_(0) {}
    int dim_;
    std::array<Complex, 4> a_{};
};

/// Hermitian, unit-trace complex matrix (dim 2 or 4). Construction
/// checks Hermiticity (1e-10) and trace (1e-8), then symmetrizes and
/// rescales exactly. Positivity is checked where eigenvalues are needed.
class DensityMatrix {
public:
    explicit DensityMatrix(const ComplexMatrix& m,
                           double hermitian_tol = 1e-10,
                           double trace_tol = 1e-8);
    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return m_.dim(); }
    const ComplexMatrix& matrix() const { return m_; }
    const Complex& operator()(int row, int col) const { return m_(row, col); }

    /// Smallest eigenvalue; used as the positivity monitor.
    double min_eigenvalue() const;

private:
    ComplexMatrix m_;
};

/// Kronecker product of two 2x2 matrices; first factor indexes the
/// first atom (row-major block convention, basis order {gg, gr, rg, rr}).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenSystem {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // orthonormal columns; column i pairs with eigenvalues[i]
};

/// Eigendecomposition of a Hermitian matrix: closed form for dim 2,
/// cyclic Jacobi rotations for dim 3/4. Each eigenvector is phase-fixed
/// so its largest-magnitude component is real positive.
EigenSystem hermitian_eigensystem(const ComplexMatrix& h);

enum class Keep { first, second };

/// Reduced 2x2 density matrix of one atom of a two-atom state.
DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep);

/// S = -sum_i lambda_i log2 lambda_i, in bits. Eigenvalues in
/// [-negative_tol, 0) are clipped to zero; below that is a contract violation.
double von_neumann_entropy(const DensityMatrix& rho, double negative_tol = 1e-8);

/// Pauli matrices in the {|g>, |r>} basis with sigma_z|g> = +|g>.
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& identity2();

}  // namespace lzsim::qmath
