#pragma once

#include <random>
#include <vector>

#include "lzsim/qmath.hpp"

namespace lzsim::testing {

using qmath::Complex;
using qmath::ComplexMatrix;
using qmath::DensityMatrix;
using qmath::StateVector;

inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed1234);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline ComplexMatrix random_hermitian(int dim, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix h(dim);
    for (int r = 0; r < dim; ++r) {
        h(r, r) = g(rng());
        for (int c = r + 1; c < dim; ++c) {
            const Complex z{g(rng()), g(rng())};
            h(r, c) = z;
            h(c, r) = std::conj(z);
        }
    }
    return h;
}

inline StateVector random_state(int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Complex> a(dim);
    for (auto& z : a) z = Complex{g(rng()), g(rng())};
    return StateVector(dim, a);
}

/// Mixture of `rank` random pure states with random weights.
inline DensityMatrix random_density(int dim, int rank) {
    std::vector<double> w(rank);
    double total = 0.0;
    for (double& x : w) {
        x = uniform(0.05, 1.0);
        total += x;
    }
    ComplexMatrix m(dim);
    for (int k = 0; k < rank; ++k) {
        const StateVector psi = random_state(dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) m(r, c) += (w[k] / total) * psi[r] * std::conj(psi[c]);
    }
    return DensityMatrix(m);
}

/// Random 2x2 unitary (angle parametrization; global phase dropped).
inline ComplexMatrix random_unitary2() {
    const double theta = uniform(0.0, 3.14159265358979 / 2.0);
    const double alpha = uniform(0.0, 2.0 * 3.14159265358979);
    const double beta = uniform(0.0, 2.0 * 3.14159265358979);
    ComplexMatrix u(2);
    u(0, 0) = std::polar(std::cos(theta), alpha);
    u(0, 1) = std::polar(std::sin(theta), beta);
    u(1, 0) = -std::polar(std::sin(theta), -beta);
    u(1, 1) = std::polar(std::cos(theta), -alpha);
    return u;
}

/// Random symmetric-basis pure state (dim 3) with non-negative moduli.
inline StateVector random_symmetric_state() {
    std::normal_distribution<double> g(0.0, 1.0);
    const double a = std::abs(g(rng())) + 0.05;
    const double b = std::abs(g(rng())) + 0.05;
    const double c = std::abs(g(rng())) + 0.05;
    const double t1 = uniform(0.0, 2.0 * 3.14159265358979);
    const double t2 = uniform(0.0, 2.0 * 3.14159265358979);
    return StateVector(3, {Complex{a, 0.0}, std::polar(b, t1), std::polar(c, t2)});
}

}  // namespace lzsim::testing
