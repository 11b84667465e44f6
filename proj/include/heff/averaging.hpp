#pragma once

// Explicit low-pass kernel averaging of operator time series, the general
// second-order effective Hamiltonian
//
//     H_eff(t) = avg(H) + ( avg([H, V1]) - [avg H, avg V1] ) / 2,
//
// and the non-Hermitian diagnostic route
//
//     calH(t) = i (d/dt avg U) (avg U)^{-1},
//
// used as independent oracles for the compact formula.  The kernel is a
// unit-area Gaussian of width tau, deliberately non-causal; its transfer
// value at frequency w is exp(-w^2 tau^2 / 2).

#include <optional>
#include <vector>

#include "heff/model.hpp"
#include "heff/opalg.hpp"

namespace heff {

class Kernel {
public:
    explicit Kernel(double tau);

    double tau() const { return tau_; }

    // f(t) = exp(-t^2 / 2 tau^2) / (tau sqrt(2 pi)); unit area.
    double value(double t) const;

    // fhat(w) = exp(-w^2 tau^2 / 2).
    double transfer(double omega) const;

private:
    double tau_;
};

// Uniformly sampled operator-valued time series.
class OperatorSeries {
public:
    OperatorSeries(double t0, double dt, std::vector<Operator> samples);

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    int size() const { return static_cast<int>(samples_.size()); }
    double time_at(int i) const { return t0_ + dt_ * i; }
    const Operator& sample(int i) const { return samples_[static_cast<std::size_t>(i)]; }
    const HilbertSpace& space() const { return samples_.front().space(); }

    // Nearest grid index to t; rejects t outside the grid.
    int index_near(double t) const;

private:
    double t0_;
    double dt_;
    std::vector<Operator> samples_;
};

struct KernelFeasibility {
    double max_carrier_transfer;  // max_n fhat(w_n)        (want ~0)
    double max_sum_transfer;      // max_{m,n} fhat(w_m+w_n) (want ~0)
    double min_beat_transfer;     // min_{m,n} fhat(w_m-w_n) (want ~1)
    bool ok;                      // first two <= 1e-3 and last >= 0.98
};

KernelFeasibility kernel_feasibility(const InteractionHamiltonian& h, const Kernel& k);

// Default width: solve w_1 tau = 5 (stop band); feasible only if additionally
// spread * tau <= 0.2 (pass band).  Returns nullopt when the two are
// incompatible rather than silently choosing.
std::optional<double> default_tau(const InteractionHamiltonian& h);

// Discrete convolution with the kernel by trapezoid rule; the weights are
// normalized to unit mass on the grid so a constant series maps to itself.
// The output is trimmed by ~5 tau on each end; throws if fewer than two
// output samples remain, naming the required minimum length.
OperatorSeries average_series(const OperatorSeries& s, const Kernel& k);

struct GeneralHeff {
    Operator op;
    KernelFeasibility feasibility;  // warning channel when .ok is false
};

// The kernel-route effective Hamiltonian at one instant, computed by direct
// quadrature over closed-form samples of H and V1.
GeneralHeff heff_general(const InteractionHamiltonian& h, const Kernel& k, double t);

struct NonHermitianDiagnostic {
    Operator cal_h;        // i (d/dt avg U)(avg U)^{-1}
    Operator herm;         // Hermitian part of cal_h
    double antiherm_norm;  // Frobenius norm of the anti-Hermitian remainder
    double condition;      // condition number of avg U at t
};

// pre: avg U invertible at t (condition number <= 1e6); the series must
// extend ~5 tau past t on both sides plus one sample for the derivative.
NonHermitianDiagnostic heff_nonhermitian_diagnostic(const OperatorSeries& u, const Kernel& k,
                                                    double t);

}  // namespace heff
