#include "heff/propagate.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace heff {

namespace {

constexpr double kMaxPhasePerStep = 0.05;
constexpr double kHermTol = 1e-10;

double ramp_value(double t, double t0, double burn_in) {
    if (t >= t0) return 1.0;
    const double u = (t - (t0 - burn_in)) / burn_in;  // 0..1 across the window
    const double s = std::sin(0.5 * M_PI * u);
    return s * s;
}

PropagationResult propagate_impl(const HilbertSpace& space,
                                 const std::function<Operator(double)>& hamiltonian,
                                 double omega_max, double t0, double t1, double dt,
                                 const PropagateOptions& opts, const char* source_name) {
    if (!(dt > 0.0)) throw InvariantError("propagate: dt must be > 0");
    if (!(t1 > t0)) throw InvariantError("propagate: t1 must be > t0");
    if (dt * omega_max > kMaxPhasePerStep * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "propagate: step size " << dt << " violates dt*omega_max <= " << kMaxPhasePerStep
            << " (omega_max " << omega_max << "); need dt <= " << kMaxPhasePerStep / omega_max;
        throw NumericGuardError(msg.str());
    }
    if (opts.store_every < 1) throw InvariantError("propagate: store_every must be >= 1");
    if (opts.burn_in < 0.0) throw InvariantError("propagate: burn_in must be >= 0");

    const double start = t0 - opts.burn_in;
    int steps = static_cast<int>(std::ceil((t1 - start) / dt - 1e-9));
    // round up to a store_every multiple so the stored grid stays uniform
    steps = ((steps + opts.store_every - 1) / opts.store_every) * opts.store_every;
    const double h_step = (t1 - start) / steps;

    const int d = space.dim();
    Matrix u = Matrix::Identity(d, d);
    std::vector<Operator> stored;
    stored.reserve(static_cast<std::size_t>(steps / opts.store_every) + 2);
    stored.emplace_back(space, u);

    double max_defect = 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    for (int k = 0; k < steps; ++k) {
        const double tm = start + (k + 0.5) * h_step;
        Operator h_mid = hamiltonian(tm);
        if (opts.burn_in > 0.0) h_mid = ramp_value(tm, t0, opts.burn_in) * h_mid;
        if (!is_hermitian(h_mid, kHermTol)) {
            std::ostringstream msg;
            msg << "propagate: " << source_name << " evaluated non-Hermitian at t = " << tm;
            throw InvariantError(msg.str());
        }
        es.compute(h_mid.matrix());
        const Eigen::VectorXcd phases =
            (-Complex(0.0, 1.0) * h_step * es.eigenvalues().array()).exp();
        u = (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * u).eval();

        if ((k + 1) % opts.store_every == 0) {
            max_defect = std::max(max_defect, (u.adjoint() * u - Matrix::Identity(d, d)).norm());
            stored.emplace_back(space, u);
        }
        if ((k + 1) % opts.reunitarize_every == 0 && k + 1 < steps) {
            Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
            u = (svd.matrixU() * svd.matrixV().adjoint()).eval();
        }
    }

    PropagationResult result{start, h_step, steps,
                             OperatorSeries(start, h_step * opts.store_every, std::move(stored)),
                             "midpoint-exponential", max_defect};
    return result;
}

}  // namespace

PropagationResult propagate(const InteractionHamiltonian& h, double t0, double t1, double dt,
                            const PropagateOptions& opts) {
    const double omega_max = h.term_count() > 0 ? h.omega_max() : 0.0;
    return propagate_impl(
        h.space(), [&h](double t) { return h.evaluate(t); }, omega_max, t0, t1, dt, opts,
        "interaction Hamiltonian");
}

PropagationResult propagate(const EffectiveHamiltonian& e, double t0, double t1, double dt,
                            const PropagateOptions& opts) {
    return propagate_impl(
        e.space(), [&e](double t) { return e.evaluate(t); }, e.max_abs_freq(), t0, t1, dt, opts,
        "effective Hamiltonian");
}

double fidelity(const Operator& a, const Operator& b) {
    detail::require_same_space(a, b, "fidelity");
    return std::abs((a.matrix().adjoint() * b.matrix()).trace()) / a.dim();
}

std::vector<std::vector<double>> state_populations(const PropagationResult& r,
                                                   const Eigen::VectorXcd& psi0) {
    const int d = r.unitaries.space().dim();
    if (psi0.size() != d) {
        throw InvariantError("state_populations: psi0 length does not match space dim");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(r.unitaries.size()));
    for (int i = 0; i < r.unitaries.size(); ++i) {
        Eigen::VectorXcd psi = r.unitaries.sample(i).matrix() * psi0;
        std::vector<double> row(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) row[static_cast<std::size_t>(k)] = std::norm(psi(k));
        rows.push_back(std::move(row));
    }
    return rows;
}

double phase_accumulation(const PropagationResult& r, int level_i, int level_j) {
    const int d = r.unitaries.space().dim();
    if (level_i < 0 || level_i >= d || level_j < 0 || level_j >= d) {
        throw InvariantError("phase_accumulation: level index out of range");
    }
    double phase = 0.0;
    double prev = 0.0;
    for (int k = 0; k < r.unitaries.size(); ++k) {
        const Matrix& u = r.unitaries.sample(k).matrix();
        const Complex uii = u(level_i, level_i);
        const Complex ujj = u(level_j, level_j);
        if (std::abs(uii) < 1e-12 || std::abs(ujj) < 1e-12) {
            std::ostringstream msg;
            msg << "phase_accumulation: diagonal element vanishes at sample " << k
                << "; differential phase undefined";
            throw NumericGuardError(msg.str());
        }
        const double raw = std::arg(uii) - std::arg(ujj);
        if (k == 0) {
            phase = raw;
        } else {
            double delta = raw - prev;
            delta -= 2.0 * M_PI * std::round(delta / (2.0 * M_PI));
            phase += delta;
        }
        prev = raw;
    }
    return phase;
}

}  // namespace heff
