// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.  Exits nonzero if any fail.

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "heff/catalog.hpp"
#include "heff/commands.hpp"
#include "heff/propagate.hpp"

using namespace heff;

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

Matrix final_u(const PropagationResult& r) {
    return r.unitaries.sample(r.unitaries.size() - 1).matrix();
}

InteractionHamiltonian ac_stark_interaction(double omega_rabi, double delta) {
    HilbertSpace s = HilbertSpace::qudit(2);
    return InteractionHamiltonian(s, {normalize_term((omega_rabi / 2.0) * ketbra(s, 0, 1, 0), delta)});
}

// closed-form detuned-Rabi propagator (independent oracle)
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

// --- criterion 1: AC Stark statics, differential phase, fidelity ------------

void criterion_1() {
    // exact algebraic reproduction at Omega = 0.1, Delta = 1
    const Operator static_part = james_jerke(ac_stark_interaction(0.1, 1.0)).static_part();
    Matrix expect(2, 2);
    expect << 0.0025, 0, 0, -0.0025;
    const double algebra_err = (static_part.matrix() - expect).cwiseAbs().maxCoeff();

    // dynamics at Omega/Delta = 0.05
    const double omega_rabi = 0.05, delta = 1.0, t_end = 400.0, dt = 0.01;
    InteractionHamiltonian h = ac_stark_interaction(omega_rabi, delta);
    PropagateOptions opts;
    opts.store_every = 10;
    const PropagationResult exact = propagate(h, 0.0, t_end, dt, opts);
    const double phase = phase_accumulation(exact, 1, 0);
    const double phase_expect = omega_rabi * omega_rabi / (2.0 * delta) * t_end;
    const double phase_rel = std::abs(phase - phase_expect) / phase_expect;

    const PropagationResult eff = propagate(james_jerke(h), 0.0, t_end, dt, opts);
    const double f = fidelity(Operator(h.space(), final_u(exact)), Operator(h.space(), final_u(eff)));

    const bool pass = algebra_err <= 1e-15 && phase_rel <= 0.01 && f >= 0.999;
    report(1, pass,
           "AC Stark: static entries off by " + fmt(algebra_err) + " (tol 1e-15), phase rel err " +
               fmt(phase_rel) + " (tol 1e-2), fidelity " + fmt(f) + " (>= 0.999)");
}

// --- criterion 2: negative-detuning sign rule --------------------------------

void criterion_2() {
    const Operator plus = james_jerke(ac_stark_interaction(0.1, 1.0)).static_part();
    const Operator minus = james_jerke(ac_stark_interaction(0.1, -1.0)).static_part();
    const double flip_err = (plus.matrix() + minus.matrix()).norm();
    report(2, flip_err == 0.0,
           "sign rule: || H_eff(+Delta) + H_eff(-Delta) ||_F = " + fmt(flip_err) + " (exact)");
}

// --- criterion 3: Raman transfer, leakage, period, beat signs ----------------

void criterion_3() {
    const double omega_rabi = 0.05, delta = 1.0;
    const double kappa = omega_rabi * omega_rabi / (4.0 * delta);
    const double t_swap = M_PI / (2.0 * kappa);
    const double period_expect = M_PI / kappa;

    HilbertSpace s = HilbertSpace::qudit(3);
    InteractionHamiltonian h(s, {{(omega_rabi / 2.0) * ketbra(s, 0, 2, 0), delta},
                                 {(omega_rabi / 2.0) * ketbra(s, 0, 2, 1), delta}});
    PropagateOptions opts;
    opts.store_every = 2;
    opts.burn_in = 200.0;  // interaction on since the distant past
    const double t_end = t_swap + period_expect + 300.0;
    const PropagationResult run = propagate(h, 0.0, t_end, 0.04, opts);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(3);
    psi0(0) = 1.0;
    const auto pops = state_populations(run, psi0);

    const int i_zero = run.unitaries.index_near(0.0);
    const int i_swap = run.unitaries.index_near(t_swap);
    const double p2_at_swap = pops[static_cast<std::size_t>(i_swap)][1];

    double max_p3 = 0.0;
    for (int i = i_zero; i < run.unitaries.size(); ++i) {
        max_p3 = std::max(max_p3, pops[static_cast<std::size_t>(i)][2]);
    }
    const double p3_bound = 1.5 * std::pow(omega_rabi / (2.0 * delta), 2);

    // period oracle: spacing of the first two maxima of P2 (parabola-refined)
    std::vector<double> maxima;
    for (int i = i_zero + 1; i + 1 < run.unitaries.size() && maxima.size() < 2; ++i) {
        const double a = pops[static_cast<std::size_t>(i - 1)][1];
        const double b = pops[static_cast<std::size_t>(i)][1];
        const double c = pops[static_cast<std::size_t>(i + 1)][1];
        if (b >= a && b >= c && b > 0.9) {
            const double denom = a - 2.0 * b + c;
            const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
            maxima.push_back(run.unitaries.time_at(i) + shift * run.unitaries.dt());
            i += 100;  // skip past this summit
        }
    }
    double period_rel = 1.0;
    if (maxima.size() == 2) {
        period_rel = std::abs((maxima[1] - maxima[0]) - period_expect) / period_expect;
    }

    // beat-sign regression on a split-frequency variant (Eq. typo guard)
    HilbertSpace s2 = HilbertSpace::qudit(3);
    const double d2 = 1.05;
    InteractionHamiltonian split(s2, {{(omega_rabi / 2.0) * ketbra(s2, 0, 2, 0), delta},
                                      {(omega_rabi / 2.0) * ketbra(s2, 0, 2, 1), d2}});
    const double coupling = omega_rabi * omega_rabi / (4.0 * harmonic_mean(delta, d2));
    auto terms = james_jerke(split).terms();
    bool signs_ok = terms.size() == 3;
    if (signs_ok) {
        const Matrix& low = terms[0].coeff.matrix();   // freq delta - d2 < 0
        const Matrix& high = terms[2].coeff.matrix();  // freq d2 - delta > 0
        signs_ok = std::abs(low(0, 1) - Complex(coupling, 0)) <= 1e-15 &&
                   std::abs(high(1, 0) - Complex(coupling, 0)) <= 1e-15 &&
                   (high - low.adjoint()).norm() <= 1e-15;
    }

    const bool pass = p2_at_swap >= 0.99 && max_p3 <= p3_bound && period_rel <= 0.01 && signs_ok;
    report(3, pass,
           "Raman: P2(t_swap) " + fmt(p2_at_swap) + " (>= 0.99), max P3 " + fmt(max_p3) +
               " (<= " + fmt(p3_bound) + "), period rel err " + fmt(period_rel) +
               " (tol 1e-2), beat signs " + (signs_ok ? "Hermitian-paired, +" : "WRONG"));
}

// --- criterion 4: quantum AC Stark level-resolved identity -------------------

void criterion_4() {
    const double omega_rabi = 0.02, delta = 1.0, eta = 0.1, omega0 = 0.3;
    const int fock = 8;
    CatalogEntry entry = quantum_ac_stark(omega_rabi, delta, eta, omega0, fock);
    const Operator engine =
        secular_filter(james_jerke(entry.interaction), entry.secular_cutoff).static_part();

    const double base = omega_rabi * omega_rabi / (4.0 * delta);
    const double side = eta * eta * omega_rabi * omega_rabi / 4.0;
    const double denom = delta * delta - omega0 * omega0;

    double worst = 0.0;
    for (int n = 0; n <= 5; ++n) {
        // raw level coefficients from the three m = n commutators
        const double a_level = base + side * ((2 * n + 1) * delta + omega0) / denom;
        const double b_level = base + side * ((2 * n + 1) * delta - omega0) / denom;
        worst = std::max(worst, std::abs(engine.matrix()(n, n).real() - a_level) / a_level);
        worst = std::max(worst,
                         std::abs(engine.matrix()(fock + n, fock + n).real() + b_level) / b_level);

        // offset-removed spin block against the published coefficient
        const double c_level =
            base * (1.0 + 2.0 * eta * eta * delta * delta / denom * (n + 0.5));
        const Complex m00 = engine.matrix()(n, n);
        const Complex m11 = engine.matrix()(fock + n, fock + n);
        const Complex mean = 0.5 * (m00 + m11);
        worst = std::max(worst, std::abs(m00 - mean - Complex(c_level, 0)) / c_level);
        worst = std::max(worst, std::abs(m11 - mean + Complex(c_level, 0)) / c_level);
        // off-diagonal spin entries vanish
        worst = std::max(worst, std::abs(engine.matrix()(n, fock + n)) / c_level);
    }
    report(4, worst <= 1e-12,
           "quantum AC Stark: level-resolved coefficients match to " + fmt(worst) +
               " relative on n <= 5 (tol 1e-12)");
}

// --- criterion 5: MS gate ----------------------------------------------------

void criterion_5() {
    CatalogEntry entry = ms_gate(0.02, 0.1, 1.1, 1.0, 6);
    const EntryVerification algebra = verify_entry(entry, 1e-12);

    const MsGateCheck gate = ms_gate_check(entry);

    // independent brute-force matrix-exponential oracle for the target state
    const HilbertSpace& s = entry.interaction.space();
    const Operator jy = collective_spin(s, {0, 1}, SpinAxis::Y);
    Eigen::SelfAdjointEigenSolver<Matrix> es((gate.chi * (jy * jy)).matrix());
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(s.dim());
    psi0(0) = 1.0;
    const Eigen::VectorXcd ph =
        (-Complex(0, 1) * gate.gate_time * es.eigenvalues().array()).exp();
    const Eigen::VectorXcd target_oracle =
        es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * psi0;
    Eigen::VectorXcd target_closed = Eigen::VectorXcd::Zero(s.dim());
    target_closed(0) = Complex(0.5, -0.5);
    target_closed(3 * 6) = Complex(0.5, 0.5);
    const double oracle_agrees = std::norm(target_oracle.dot(target_closed));

    const bool pass = algebra.pass && oracle_agrees >= 1.0 - 1e-12 &&
                      gate.state_fidelity_effective >= 0.999 &&
                      gate.state_fidelity_exact >= 0.999 && gate.propagator_fidelity >= 0.98;
    report(5, pass,
           "MS gate: chi Jy^2 match rel err " + fmt(algebra.worst_rel_err) +
               " (tol 1e-12, Fock <= 4), entanglement fidelity " +
               fmt(gate.state_fidelity_exact) + " (>= 0.999), exact-vs-effective fidelity " +
               fmt(gate.propagator_fidelity) + " (>= 0.98)");
}

// --- criterion 6: Hermiticity suite ------------------------------------------

void criterion_6() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> dim_dist(2, 8);
    std::uniform_int_distribution<int> n_dist(1, 4);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = dim_dist(rng);
        const int n_terms = n_dist(rng);
        HilbertSpace space = HilbertSpace::qudit(dim);
        std::vector<HarmonicTerm> terms;
        for (int k = 0; k < n_terms; ++k) {
            const double omega = 1.0 + uni(rng);
            Matrix m(dim, dim);
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j < dim; ++j) m(i, j) = Complex(uni(rng) - 0.5, uni(rng) - 0.5);
            }
            m *= 0.1 / m.norm();  // ||h|| <= 0.1 * omega_1
            terms.push_back({Operator(space, m), omega});
        }
        EffectiveHamiltonian e = james_jerke(InteractionHamiltonian(space, std::move(terms)));
        for (int k = 0; k < 10; ++k) {
            const Operator at = e.evaluate(100.0 * uni(rng));
            const double rel = (at.matrix() - at.matrix().adjoint()).norm() /
                               std::max(1.0, at.matrix().norm());
            worst = std::max(worst, rel);
        }
    }
    report(6, worst <= 1e-12,
           "Hermiticity: worst relative defect " + fmt(worst) +
               " over 100 random systems x 10 times (tol 1e-12)");
}

// --- criterion 7: kernel-route oracle agreement ------------------------------

void criterion_7() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    bool all_feasible = true;
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 4;
        HilbertSpace space = HilbertSpace::qudit(dim);
        const double w1 = 1.0;
        const double w2 = w1 * (1.0 + 0.01 + 0.029 * uni(rng));  // spread * tau <= 0.2
        std::vector<HarmonicTerm> terms;
        for (double w : {w1, w2}) {
            Matrix m(dim, dim);
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j < dim; ++j) m(i, j) = Complex(uni(rng) - 0.5, uni(rng) - 0.5);
            }
            m *= 0.1 * (0.5 + 0.5 * uni(rng)) / m.norm();
            terms.push_back({Operator(space, m), w});
        }
        InteractionHamiltonian h(space, std::move(terms));
        const double tau = 5.0 / h.omega_min();
        const Kernel kernel(tau);
        all_feasible = all_feasible && kernel_feasibility(h, kernel).ok;

        // static part of the kernel route: mean over one beat period
        const double beat = h.omega_max() - h.omega_min();
        Matrix acc = Matrix::Zero(dim, dim);
        const int n_probe = 8;
        for (int j = 0; j < n_probe; ++j) {
            acc += heff_general(h, kernel, j * (2.0 * M_PI / beat) / n_probe).op.matrix();
        }
        acc /= n_probe;
        const Operator compact = james_jerke(h).static_part();
        worst = std::max(worst, (acc - compact.matrix()).norm() / compact.matrix().norm());
    }
    report(7, worst <= 0.05 && all_feasible,
           "kernel route vs compact formula: worst static rel diff " + fmt(worst) +
               " over 20 systems (tol 5e-2)");
}

// --- criterion 8: propagator quality ------------------------------------------

void criterion_8() {
    // unitarity over 1e5 steps
    HilbertSpace s = HilbertSpace::qudit(4);
    std::mt19937_64 rng(4321);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Matrix m(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m(i, j) = Complex(uni(rng) - 0.5, uni(rng) - 0.5);
    }
    m *= 2.0 / m.norm();  // ||H|| dt <= 0.05 at dt = 0.01
    InteractionHamiltonian h(s, {{Operator(s, m), 1.0}, {Operator(s, 0.5 * m), 1.4}});
    PropagateOptions opts;
    opts.store_every = 1000;
    const PropagationResult run = propagate(h, 0.0, 1000.0, 0.01, opts);  // 1e5 steps
    const double defect = run.max_unitarity_defect;

    // convergence order against the closed-form Rabi oracle
    const double omega_rabi = 0.3, delta = 1.0, t_end = 20.0;
    InteractionHamiltonian drive = ac_stark_interaction(omega_rabi, delta);
    const Matrix oracle = rabi_oracle(omega_rabi, delta, t_end);
    const double e1 = (final_u(propagate(drive, 0.0, t_end, 0.02)) - oracle).norm();
    const double e2 = (final_u(propagate(drive, 0.0, t_end, 0.01)) - oracle).norm();
    const double ratio = e1 / e2;

    const bool pass = defect <= 1e-9 && ratio >= 3.5 && ratio <= 4.5;
    report(8, pass,
           "propagator: unitarity defect " + fmt(defect) + " over 1e5 steps (tol 1e-9), halving-dt "
           "error ratio " + fmt(ratio) + " (in [3.5, 4.5])");
}

// --- criterion 9: catalog determinism ----------------------------------------

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_9() {
    const fs::path base = fs::temp_directory_path() / "heff_acceptance_determinism";
    fs::remove_all(base);
    bool identical = true;
    bool all_entries_pass = true;
    std::string detail;
    for (const auto& name : catalog_names()) {
        CommonFlags flags_a, flags_b;
        flags_a.out_dir = (base / "a").string();
        flags_b.out_dir = (base / "b").string();
        const RunReport first = cmd_catalog(name, {}, flags_a);
        cmd_catalog(name, {}, flags_b);
        all_entries_pass = all_entries_pass && first.all_passed;
        for (const auto& entry : fs::recursive_directory_iterator(base / "a" / name)) {
            if (!entry.is_regular_file()) continue;
            const fs::path rel = fs::relative(entry.path(), base / "a");
            if (file_bytes(entry.path()) != file_bytes(base / "b" / rel)) {
                identical = false;
                detail += " " + rel.string();
            }
        }
    }
    report(9, identical && all_entries_pass,
           std::string("determinism: double runs of every catalog entry pass and produce "
                       "byte-identical files") +
               (identical ? "" : " EXCEPT" + detail) +
               (all_entries_pass ? "" : " (some entry checks FAILED)"));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures == 0) {
        std::printf("acceptance: all 9 criteria passed\n");
    } else {
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
