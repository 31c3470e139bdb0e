#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lzsim/model.hpp"
#include "test_helpers.hpp"

using namespace lzsim;
using qmath::Complex;
using qmath::ComplexMatrix;
using qmath::StateVector;

TEST_CASE("single-atom Hamiltonian transcription") {
    const ComplexMatrix h0 = model::single_atom_hamiltonian(0.0, 1.0);
    CHECK(h0(0, 0) == Complex{0.0, 0.0});
    CHECK(h0(0, 1) == Complex{0.5, 0.0});
    CHECK(h0(1, 0) == Complex{0.5, 0.0});
    CHECK(h0(1, 1) == Complex{0.0, 0.0});

    const ComplexMatrix h2 = model::single_atom_hamiltonian(2.0, 1.0);
    CHECK(h2(1, 1) == Complex{-2.0, 0.0});

    // eigenvalues (-delta +- sqrt(delta^2 + omega^2))/2
    const auto es = qmath::hermitian_eigensystem(h2);
    CHECK(es.eigenvalues[0] == doctest::Approx((-2.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    CHECK(es.eigenvalues[1] == doctest::Approx((-2.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("pair Hamiltonian diagonal and exchange symmetry") {
    const double delta = 1.3, v0 = 0.7;
    const ComplexMatrix h = model::pair_hamiltonian(delta, 1.0, v0);
    CHECK(h(0, 0).real() == doctest::Approx(0.0));
    CHECK(h(1, 1).real() == doctest::Approx(-delta));
    CHECK(h(2, 2).real() == doctest::Approx(-delta));
    CHECK(h(3, 3).real() == doctest::Approx(-2.0 * delta + v0));

    // [H, SWAP] = 0
    const ComplexMatrix& swap = model::swap_operator();
    const ComplexMatrix comm = h * swap - swap * h;
    CHECK(comm.max_abs() < 1e-14);
}

TEST_CASE("pair spectrum at v0 = 0 is the two-atom sum") {
    const auto pair = qmath::hermitian_eigensystem(model::pair_hamiltonian(0.0, 1.0, 0.0));
    CHECK(pair.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pair.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pair.eigenvalues[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pair.eigenvalues[3] == doctest::Approx(1.0).epsilon(1e-12));

    // generic parameters: Minkowski sum of the one-atom spectra
    for (int trial = 0; trial < 10; ++trial) {
        const double delta = testing::uniform(-3.0, 3.0);
        const auto one = qmath::hermitian_eigensystem(model::single_atom_hamiltonian(delta, 1.0));
        auto two = qmath::hermitian_eigensystem(model::pair_hamiltonian(delta, 1.0, 0.0));
        std::vector<double> sums;
        for (double a : one.eigenvalues)
            for (double b : one.eigenvalues) sums.push_back(a + b);
        std::sort(sums.begin(), sums.end());
        for (int i = 0; i < 4; ++i) {
            CHECK(two.eigenvalues[i] == doctest::Approx(sums[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("symmetric projection matches the stated matrix") {
    const double r = 1.0 / std::sqrt(2.0);
    const ComplexMatrix h = model::pair_hamiltonian_symmetric(0.0, 1.0, 0.5);
    CHECK(h(0, 0).real() == doctest::Approx(0.0));
    CHECK(h(0, 1).real() == doctest::Approx(r));
    CHECK(h(0, 2).real() == doctest::Approx(0.0));
    CHECK(h(1, 1).real() == doctest::Approx(0.0));
    CHECK(h(1, 2).real() == doctest::Approx(r));
    CHECK(h(2, 2).real() == doctest::Approx(0.5));
}

TEST_CASE("symmetric sector spectrum embeds in the full spectrum") {
    for (int trial = 0; trial < 10; ++trial) {
        const double delta = testing::uniform(-5.0, 5.0);
        const double v0 = testing::uniform(0.0, 2.0);
        const auto sym =
            qmath::hermitian_eigensystem(model::pair_hamiltonian_symmetric(delta, 1.0, v0));
        auto full = qmath::hermitian_eigensystem(model::pair_hamiltonian(delta, 1.0, v0));

        // remove the antisymmetric eigenvalue -delta; the rest must match
        std::vector<double> rest = full.eigenvalues;
        const auto it = std::min_element(rest.begin(), rest.end(), [&](double a, double b) {
            return std::abs(a + delta) < std::abs(b + delta);
        });
        rest.erase(it);
        for (int i = 0; i < 3; ++i) {
            CHECK(rest[i] == doctest::Approx(sym.eigenvalues[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("antisymmetric state decouples from the symmetric sector") {
    const double r = 1.0 / std::sqrt(2.0);
    const StateVector anti(4, {0.0, r, -r, 0.0});
    const StateVector s(4, {0.0, r, r, 0.0});
    const double delta = 0.8, v0 = 1.1;
    const ComplexMatrix h = model::pair_hamiltonian(delta, 1.0, v0);

    Complex h_anti[4] = {};
    for (int row = 0; row < 4; ++row)
        for (int c = 0; c < 4; ++c) h_anti[row] += h(row, c) * anti[c];

    // eigenvector with eigenvalue -delta
    for (int row = 0; row < 4; ++row) {
        CHECK(std::abs(h_anti[row] - (-delta) * anti[row]) < 1e-12);
    }
    // no coupling to |s>, |gg>, |rr>
    Complex overlap_s = 0.0;
    for (int row = 0; row < 4; ++row) overlap_s += std::conj(s[row]) * h_anti[row];
    CHECK(std::abs(overlap_s) < 1e-12);
    CHECK(std::abs(h_anti[0]) < 1e-12);
    CHECK(std::abs(h_anti[3]) < 1e-12);
}

TEST_CASE("adiabatic states at the crossing and far away") {
    const auto mid = model::adiabatic_states(0.0, 1.0);
    CHECK(mid.e_plus == doctest::Approx(0.5));
    CHECK(mid.e_minus == doctest::Approx(-0.5));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(mid.phi_plus[0] - Complex{r, 0.0}) < 1e-12);
    CHECK(std::abs(mid.phi_plus[1] - Complex{r, 0.0}) < 1e-12);
    CHECK(std::abs(mid.phi_minus[0] - Complex{-r, 0.0}) < 1e-12);
    CHECK(std::abs(mid.phi_minus[1] - Complex{r, 0.0}) < 1e-12);

    // far above the crossing phi_+ approaches |g>, far below it approaches |r>
    const auto above = model::adiabatic_states(100.0, 1.0);
    CHECK(std::abs(above.phi_plus[0]) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(std::abs(above.phi_plus[1]) == doctest::Approx(0.0).epsilon(1e-2));
    const auto below = model::adiabatic_states(-100.0, 1.0);
    CHECK(std::abs(below.phi_plus[1]) == doctest::Approx(1.0).epsilon(1e-2));

    CHECK_THROWS_AS(model::adiabatic_states(1.0, 0.0), DomainError);
}

TEST_CASE("adiabatic pair identities and eigenpair property") {
    for (double delta : {-50.0, -3.0, -0.4, 0.0, 0.7, 5.0, 80.0}) {
        const auto ad = model::adiabatic_states(delta, 1.0);
        CHECK(ad.beta_plus * ad.beta_minus == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(ad.beta_plus - ad.beta_minus == doctest::Approx(2.0 * delta).epsilon(1e-10));
        CHECK(ad.omega_bar == doctest::Approx(std::sqrt(delta * delta + 1.0)));

        // gap = omega_bar >= omega, equality only at delta = 0
        CHECK(ad.e_plus - ad.e_minus == doctest::Approx(ad.omega_bar).epsilon(1e-12));
        if (delta != 0.0) CHECK(ad.e_plus - ad.e_minus > 1.0);

        const ComplexMatrix h = model::single_atom_hamiltonian(delta, 1.0);
        for (auto [energy, state] :
             {std::pair{ad.e_plus, &ad.phi_plus}, std::pair{ad.e_minus, &ad.phi_minus}}) {
            for (int row = 0; row < 2; ++row) {
                Complex hv = 0.0;
                for (int c = 0; c < 2; ++c) hv += h(row, c) * (*state)[c];
                CHECK(std::abs(hv - energy * (*state)[row]) < 1e-10);
            }
        }
        CHECK(std::abs(ad.phi_plus.inner(ad.phi_minus)) < 1e-12);
    }
}

TEST_CASE("crossing detunings") {
    const auto c1 = model::crossing_detunings(0.5);
    CHECK(c1[0] == doctest::Approx(0.0));
    CHECK(c1[1] == doctest::Approx(0.25));
    CHECK(c1[2] == doctest::Approx(0.5));

    const auto c0 = model::crossing_detunings(0.0);
    CHECK(c0[0] == 0.0);
    CHECK(c0[1] == 0.0);
    CHECK(c0[2] == 0.0);

    const auto c2 = model::crossing_detunings(2.0);
    CHECK(c2[1] == doctest::Approx(1.0));
    CHECK(c2[2] == doctest::Approx(2.0));
}

TEST_CASE("schedule validation") {
    model::SweepSchedule s;
    s.v = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.v = 1.0;
    s.delta_start = 1.0;
    s.delta_end = -1.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("symmetric embedding") {
    const StateVector sym(3, {Complex{0.6, 0.0}, Complex{0.0, 0.8}, Complex{0.0, 0.0}});
    const StateVector full = model::embed_symmetric_state(sym);
    CHECK(full.population(0) == doctest::Approx(0.36));
    CHECK(full.population(1) == doctest::Approx(0.32));
    CHECK(full.population(2) == doctest::Approx(0.32));
    CHECK(full.population(3) == doctest::Approx(0.0));
}
