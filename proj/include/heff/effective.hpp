#pragma once

// The core engine: the second-order time-averaged effective Hamiltonian
//
//     H_eff(t) = sum_{m,n} (1/wbar_mn) [h_m^dag, h_n] exp(i (w_m - w_n) t),
//
// with 1/wbar_mn = (1/w_m + 1/w_n)/2 the harmonic-mean frequency of the pair.
// All N^2 beat terms are kept; dropping off-secular beats is the explicit
// secular_filter step.  Coefficients are stored ungrouped (with their (m,n)
// provenance) and grouped by beat frequency lazily, so the pair symmetry
// C_nm = C_mn^dag, beat(n,m) = -beat(m,n) stays inspectable.

#include <vector>

#include "heff/model.hpp"
#include "heff/opalg.hpp"

namespace heff {

struct EffectiveTerm {
    Operator coeff;  // angular-frequency units
    double freq;     // beat frequency w_m - w_n; may be negative or zero
};

struct RawEffectiveTerm {
    int m = -1;  // source term indices; -1 for hand-built terms
    int n = -1;
    double freq;
    Operator coeff;
};

// 1/harmonic_mean(a,b) = (1/a + 1/b)/2.
double harmonic_mean(double omega_m, double omega_n);

class EffectiveHamiltonian {
public:
    // Hand-built terms (catalog expectations, deserialized files).  Enforces
    // the Hermitian pairing invariant on the grouped view: every +phi group
    // must have a -phi group carrying the adjoint coefficient.
    EffectiveHamiltonian(HilbertSpace space, std::vector<EffectiveTerm> terms, double freq_tol);

    // Raw N^2 list with provenance; same pairing check.
    static EffectiveHamiltonian from_raw(HilbertSpace space, std::vector<RawEffectiveTerm> raw,
                                         double freq_tol);

    const HilbertSpace& space() const { return space_; }
    const std::vector<RawEffectiveTerm>& raw_terms() const { return raw_; }
    double freq_tol() const { return freq_tol_; }

    // Grouped by beat frequency (|f1 - f2| <= freq_tol), ascending, zero-norm
    // groups retained.  Group coefficients are summed in (m,n) order.
    std::vector<EffectiveTerm> terms() const;

    // sum over groups coeff * exp(i freq t); Hermitian by the pairing invariant.
    Operator evaluate(double t) const;

    // Coefficient of the zero-beat group (zero operator if none).
    Operator static_part() const;

    double max_abs_freq() const;

private:
    HilbertSpace space_;
    std::vector<RawEffectiveTerm> raw_;
    double freq_tol_;
};

// Applies the compact formula to a normalized interaction Hamiltonian.
// The beat-grouping tolerance is set to 1e-9 * w_1.
EffectiveHamiltonian james_jerke(const InteractionHamiltonian& h);

// Retains beats with |freq| <= cutoff.  Pairs are dropped together since
// |phi| = |-phi|, so the pairing invariant survives.
EffectiveHamiltonian secular_filter(const EffectiveHamiltonian& e, double cutoff);

// Subtracts the trace part coeff - (tr coeff / d) I from every zero-beat
// coefficient; oscillating terms untouched.
EffectiveHamiltonian remove_identity_offset(const EffectiveHamiltonian& e);

}  // namespace heff
