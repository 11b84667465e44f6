#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "heff/propagate.hpp"
#include "test_helpers.hpp"

using namespace heff;
using heff::test::close;
using heff::test::random_system;

namespace {

HilbertSpace two_level() { return HilbertSpace::qudit(2); }

InteractionHamiltonian ac_stark_input(double omega_rabi, double delta) {
    HilbertSpace s = two_level();
    return InteractionHamiltonian(s, {{(omega_rabi / 2.0) * ketbra(s, 0, 1, 0), delta}});
}

EffectiveHamiltonian static_hamiltonian(const Operator& h0) {
    return EffectiveHamiltonian(h0.space(), {{h0, 0.0}}, 1e-9);
}

// closed-form propagator of the detuned-drive problem:
// U(t) = R(t) exp(-i ((Omega/2) sx - (Delta/2) sz) t), R = diag(e^{i D t/2}, e^{-i D t/2})
Matrix rabi_oracle(double omega_rabi, double delta, double t) {
    Matrix gen(2, 2);
    gen << delta / 2.0, omega_rabi / 2.0, omega_rabi / 2.0, -delta / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gen);
    const Eigen::VectorXcd ph = (-Complex(0, 1) * t * es.eigenvalues().array()).exp();
    Matrix rot = Matrix::Zero(2, 2);
    rot(0, 0) = std::exp(Complex(0, delta * t / 2.0));
    rot(1, 1) = std::exp(Complex(0, -delta * t / 2.0));
    return rot * es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix final_u(const PropagationResult& r) {
    return r.unitaries.sample(r.unitaries.size() - 1).matrix();
}

}  // namespace

TEST_CASE("zero Hamiltonian stays at the identity") {
    HilbertSpace s = two_level();
    PropagationResult r = propagate(InteractionHamiltonian(s, {}), 0.0, 5.0, 0.1);
    for (int i = 0; i < r.unitaries.size(); ++i) {
        CHECK((r.unitaries.sample(i).matrix() - Matrix::Identity(2, 2)).norm() == 0.0);
    }
    CHECK(r.max_unitarity_defect == 0.0);
}

TEST_CASE("static Rabi flopping against sin^2(Omega t / 2)") {
    HilbertSpace s = two_level();
    const double omega_rabi = 0.4;
    Operator h0 = (omega_rabi / 2.0) * (ketbra(s, 0, 1, 0) + ketbra(s, 0, 0, 1));
    PropagationResult r = propagate(static_hamiltonian(h0), 0.0, 30.0, 0.01);
    Eigen::VectorXcd psi0(2);
    psi0 << 1, 0;
    const auto pops = state_populations(r, psi0);
    for (int i = 0; i < r.unitaries.size(); i += 50) {
        const double t = r.unitaries.time_at(i);
        const double expect = std::pow(std::sin(omega_rabi * t / 2.0), 2);
        CHECK(std::abs(pops[static_cast<std::size_t>(i)][1] - expect) < 1e-8);
    }
}

TEST_CASE("detuned drive follows the closed-form oracle and transfer envelope") {
    const double omega_rabi = 0.05, delta = 1.0;
    InteractionHamiltonian h = ac_stark_input(omega_rabi, delta);
    PropagationResult r = propagate(h, 0.0, 200.0, 0.01, {10});
    Eigen::VectorXcd psi0(2);
    psi0 << 1, 0;
    const auto pops = state_populations(r, psi0);
    const double envelope = omega_rabi * omega_rabi / (omega_rabi * omega_rabi + delta * delta);
    double worst_vs_oracle = 0.0;
    double max_p2 = 0.0;
    for (int i = 0; i < r.unitaries.size(); ++i) {
        const double t = r.unitaries.time_at(i);
        const Matrix u_oracle = rabi_oracle(omega_rabi, delta, t);
        worst_vs_oracle =
            std::max(worst_vs_oracle, (r.unitaries.sample(i).matrix() - u_oracle).norm());
        max_p2 = std::max(max_p2, pops[static_cast<std::size_t>(i)][1]);
    }
    CHECK(worst_vs_oracle < 5e-6);  // integrator O(dt^2) floor at dt = 0.01
    // far-detuned transfer never exceeds the generalized-Rabi envelope
    CHECK(max_p2 <= envelope + 1e-5);
    CHECK(max_p2 > 0.9 * envelope);  // and the envelope is actually reached
}

TEST_CASE("fidelity") {
    HilbertSpace s = two_level();
    Operator id = Operator::identity(s);
    Operator sx = ketbra(s, 0, 1, 0) + ketbra(s, 0, 0, 1);
    Operator u(s, rabi_oracle(0.3, 0.7, 2.0));
    CHECK(fidelity(u, u) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(id, Complex(0, 1) * id) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(id, sx) == 0.0);
}

TEST_CASE("populations are normalized rows") {
    std::mt19937_64 rng(6);
    InteractionHamiltonian h = random_system(rng, 4, 2, 0.3);
    PropagationResult r = propagate(h, 0.0, 20.0, 0.01, {5});
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(4);
    psi0(2) = 1;
    for (const auto& row : state_populations(r, psi0)) {
        double sum = 0.0;
        for (double p : row) sum += p;
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("phase accumulation conventions") {
    HilbertSpace s = two_level();
    SUBCASE("H = 0 accumulates nothing") {
        PropagationResult r = propagate(InteractionHamiltonian(s, {}), 0.0, 3.0, 0.1);
        CHECK(phase_accumulation(r, 0, 1) == 0.0);
    }
    SUBCASE("static diagonal H = diag(0, eps)") {
        const double eps = 0.3;
        Operator h0 = eps * ketbra(s, 0, 1, 1);
        const double t_end = 40.0;  // phase 12 rad needs unwrapping
        PropagationResult r = propagate(static_hamiltonian(h0), 0.0, t_end, 0.05);
        // documented convention: phase(i, j) = (E_j - E_i) t
        CHECK(phase_accumulation(r, 0, 1) == doctest::Approx(eps * t_end).epsilon(1e-10));
        CHECK(phase_accumulation(r, 1, 0) == doctest::Approx(-eps * t_end).epsilon(1e-10));
    }
    SUBCASE("AC Stark differential phase approximates (Omega^2/2 Delta) t") {
        InteractionHamiltonian h = ac_stark_input(0.05, 1.0);
        PropagationResult r = propagate(h, 0.0, 400.0, 0.01, {10});
        const double expect = 0.05 * 0.05 / 2.0 * 400.0;
        CHECK(phase_accumulation(r, 1, 0) == doctest::Approx(expect).epsilon(0.01));
    }
}

TEST_CASE("unitarity defect stays small") {
    std::mt19937_64 rng(8);
    InteractionHamiltonian h = random_system(rng, 4, 3, 0.5);
    PropagationResult r = propagate(h, 0.0, 100.0, 0.01, {100});
    CHECK(r.max_unitarity_defect < 1e-10);
}

TEST_CASE("composition over subintervals") {
    std::mt19937_64 rng(9);
    InteractionHamiltonian h = random_system(rng, 3, 2, 0.4);
    const double T = 24.0, dt = 0.01;
    const Matrix whole = final_u(propagate(h, 0.0, T, dt));
    const Matrix first = final_u(propagate(h, 0.0, T / 2.0, dt));
    const Matrix second = final_u(propagate(h, T / 2.0, T, dt));
    CHECK((second * first - whole).norm() < 1e-8);
}

TEST_CASE("midpoint integrator is second order") {
    const double omega_rabi = 0.3, delta = 1.0, T = 20.0;
    InteractionHamiltonian h = ac_stark_input(omega_rabi, delta);
    const Matrix oracle = rabi_oracle(omega_rabi, delta, T);
    const double e1 = (final_u(propagate(h, 0.0, T, 0.02)) - oracle).norm();
    const double e2 = (final_u(propagate(h, 0.0, T, 0.01)) - oracle).norm();
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("effective route matches exact AC Stark dynamics") {
    const double omega_rabi = 0.05, delta = 1.0, T = 400.0;
    InteractionHamiltonian h = ac_stark_input(omega_rabi, delta);
    HilbertSpace s = two_level();
    const double shift = omega_rabi * omega_rabi / (4.0 * delta);
    Operator h_eff = shift * (ketbra(s, 0, 0, 0) - ketbra(s, 0, 1, 1));
    const Matrix u_ex = final_u(propagate(h, 0.0, T, 0.01));
    const Matrix u_eff = final_u(propagate(static_hamiltonian(h_eff), 0.0, T, 0.01));
    const double f = fidelity(Operator(s, u_ex), Operator(s, u_eff));
    CHECK(f >= 1.0 - 5.0 * std::pow(omega_rabi / delta, 2));
    CHECK(f >= 0.999);
}

TEST_CASE("step-size guard names the required dt") {
    InteractionHamiltonian h = ac_stark_input(0.1, 2.0);
    CHECK_THROWS_WITH_AS(propagate(h, 0.0, 10.0, 0.1), doctest::Contains("need dt <="),
                         NumericGuardError);
}

TEST_CASE("burn-in prepends a ramped window") {
    InteractionHamiltonian h = ac_stark_input(0.05, 1.0);
    PropagateOptions opts;
    opts.burn_in = 20.0;
    PropagationResult r = propagate(h, 0.0, 10.0, 0.01, opts);
    CHECK(r.unitaries.t0() == -20.0);
    CHECK((r.unitaries.sample(0).matrix() - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK(r.t0 == -20.0);
}

TEST_CASE("invalid propagation arguments") {
    InteractionHamiltonian h = ac_stark_input(0.05, 1.0);
    CHECK_THROWS_AS(propagate(h, 0.0, -1.0, 0.01), InvariantError);
    CHECK_THROWS_AS(propagate(h, 0.0, 1.0, -0.01), InvariantError);
    PropagateOptions opts;
    opts.store_every = 0;
    CHECK_THROWS_AS(propagate(h, 0.0, 1.0, 0.01, opts), InvariantError);
}
