#include "heff/averaging.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace heff {

namespace {
constexpr double kWindowTaus = 5.0;       // kernel mass outside +-5 tau ~ 5.7e-7
constexpr double kStopBandMax = 1e-3;
constexpr double kPassBandMin = 0.98;
constexpr double kMaxCondition = 1e6;

// Trapezoid kernel weights on offsets -K..K, normalized to unit mass.
std::vector<double> kernel_weights(const Kernel& k, double dt, int half_window) {
    std::vector<double> w(static_cast<std::size_t>(2 * half_window + 1));
    double sum = 0.0;
    for (int j = -half_window; j <= half_window; ++j) {
        double v = k.value(j * dt);
        if (j == -half_window || j == half_window) v *= 0.5;
        w[static_cast<std::size_t>(j + half_window)] = v;
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}
}  // namespace

Kernel::Kernel(double tau) : tau_(tau) {
    if (!(tau > 0.0)) throw InvariantError("Kernel: tau must be > 0");
}

double Kernel::value(double t) const {
    return std::exp(-t * t / (2.0 * tau_ * tau_)) / (tau_ * std::sqrt(2.0 * M_PI));
}

double Kernel::transfer(double omega) const {
    return std::exp(-0.5 * omega * omega * tau_ * tau_);
}

OperatorSeries::OperatorSeries(double t0, double dt, std::vector<Operator> samples)
    : t0_(t0), dt_(dt), samples_(std::move(samples)) {
    if (samples_.size() < 2) throw InvariantError("OperatorSeries: needs at least 2 samples");
    if (!(dt_ > 0.0)) throw InvariantError("OperatorSeries: dt must be > 0");
    for (const Operator& op : samples_) {
        if (op.space() != samples_.front().space()) {
            throw InvariantError("OperatorSeries: samples live on different spaces");
        }
    }
}

int OperatorSeries::index_near(double t) const {
    const double x = (t - t0_) / dt_;
    const int i = static_cast<int>(std::lround(x));
    if (i < 0 || i >= size()) {
        std::ostringstream msg;
        msg << "OperatorSeries: time " << t << " outside grid [" << t0_ << ", " << time_at(size() - 1)
            << "]";
        throw InvariantError(msg.str());
    }
    return i;
}

KernelFeasibility kernel_feasibility(const InteractionHamiltonian& h, const Kernel& k) {
    KernelFeasibility r{0.0, 0.0, 1.0, true};
    const auto& terms = h.terms();
    for (std::size_t m = 0; m < terms.size(); ++m) {
        r.max_carrier_transfer = std::max(r.max_carrier_transfer, k.transfer(terms[m].omega));
        for (std::size_t n = 0; n < terms.size(); ++n) {
            r.max_sum_transfer =
                std::max(r.max_sum_transfer, k.transfer(terms[m].omega + terms[n].omega));
            r.min_beat_transfer =
                std::min(r.min_beat_transfer, k.transfer(terms[m].omega - terms[n].omega));
        }
    }
    r.ok = r.max_carrier_transfer <= kStopBandMax && r.max_sum_transfer <= kStopBandMax &&
           r.min_beat_transfer >= kPassBandMin;
    return r;
}

std::optional<double> default_tau(const InteractionHamiltonian& h) {
    if (h.term_count() < 1) return std::nullopt;
    const double tau = 5.0 / h.omega_min();
    const double spread = h.omega_max() - h.omega_min();
    if (spread * tau > 0.2) return std::nullopt;
    return tau;
}

OperatorSeries average_series(const OperatorSeries& s, const Kernel& k) {
    const int half_window = static_cast<int>(std::ceil(kWindowTaus * k.tau() / s.dt()));
    const int n_out = s.size() - 2 * half_window;
    if (n_out < 2) {
        std::ostringstream msg;
        msg << "average_series: window too short; need at least " << (2 * half_window + 2)
            << " samples for tau " << k.tau() << " at dt " << s.dt() << ", got " << s.size();
        throw NumericGuardError(msg.str());
    }
    const auto w = kernel_weights(k, s.dt(), half_window);
    std::vector<Operator> out;
    out.reserve(static_cast<std::size_t>(n_out));
    for (int i = half_window; i < s.size() - half_window; ++i) {
        Matrix acc = Matrix::Zero(s.space().dim(), s.space().dim());
        for (int j = -half_window; j <= half_window; ++j) {
            acc += w[static_cast<std::size_t>(j + half_window)] * s.sample(i + j).matrix();
        }
        out.emplace_back(s.space(), std::move(acc));
    }
    return OperatorSeries(s.time_at(half_window), s.dt(), std::move(out));
}

GeneralHeff heff_general(const InteractionHamiltonian& h, const Kernel& k, double t) {
    if (h.term_count() == 0) {
        return {Operator::zero(h.space()), kernel_feasibility(h, k)};
    }
    // products H*V1 oscillate up to 2 w_N; resolve those
    const double dt = 0.05 / (2.0 * h.omega_max());
    const int half_window = static_cast<int>(std::ceil(kWindowTaus * k.tau() / dt));
    const auto w = kernel_weights(k, dt, half_window);
    const int d = h.space().dim();
    Matrix avg_h = Matrix::Zero(d, d);
    Matrix avg_v = Matrix::Zero(d, d);
    Matrix avg_c = Matrix::Zero(d, d);
    for (int j = -half_window; j <= half_window; ++j) {
        const double wj = w[static_cast<std::size_t>(j + half_window)];
        const Matrix ht = h.evaluate(t + j * dt).matrix();
        const Matrix vt = h.v1(t + j * dt).matrix();
        avg_h += wj * ht;
        avg_v += wj * vt;
        avg_c += wj * (ht * vt - vt * ht);
    }
    Matrix result = avg_h + 0.5 * (avg_c - (avg_h * avg_v - avg_v * avg_h));
    return {Operator(h.space(), std::move(result)), kernel_feasibility(h, k)};
}

NonHermitianDiagnostic heff_nonhermitian_diagnostic(const OperatorSeries& u, const Kernel& k,
                                                    double t) {
    const int i = u.index_near(t);
    const int half_window = static_cast<int>(std::ceil(kWindowTaus * k.tau() / u.dt()));
    if (i - 1 - half_window < 0 || i + 1 + half_window >= u.size()) {
        std::ostringstream msg;
        msg << "heff_nonhermitian_diagnostic: series too short around t = " << t << "; need "
            << (half_window + 1) << " samples on each side of index " << i;
        throw NumericGuardError(msg.str());
    }
    const auto w = kernel_weights(k, u.dt(), half_window);
    const int d = u.space().dim();
    auto averaged = [&](int center) {
        Matrix acc = Matrix::Zero(d, d);
        for (int j = -half_window; j <= half_window; ++j) {
            acc += w[static_cast<std::size_t>(j + half_window)] * u.sample(center + j).matrix();
        }
        return acc;
    };
    const Matrix avg_u = averaged(i);
    const Matrix d_avg_u = (averaged(i + 1) - averaged(i - 1)) / (2.0 * u.dt());

    Eigen::JacobiSVD<Matrix> svd(avg_u);
    const double cond = svd.singularValues()(0) / svd.singularValues()(d - 1);
    if (!(cond <= kMaxCondition)) {
        std::ostringstream msg;
        msg << "heff_nonhermitian_diagnostic: averaged propagator ill-conditioned at t = " << t
            << " (condition number " << cond << "); averaging has washed out too much of U";
        throw NumericGuardError(msg.str());
    }
    // calH = i * dU * inv(avgU), via avgU^T x^T = dU^T
    const Matrix cal_h_m =
        Complex(0.0, 1.0) *
        avg_u.transpose().partialPivLu().solve(d_avg_u.transpose()).transpose();
    NonHermitianDiagnostic out{Operator(u.space(), cal_h_m),
                               hermitian_part(Operator(u.space(), cal_h_m)), 0.0, cond};
    out.antiherm_norm = (out.cal_h - out.herm).matrix().norm();
    return out;
}

}  // namespace heff
