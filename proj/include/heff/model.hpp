#pragma once

// Interaction Hamiltonians as sums of harmonically oscillating terms,
//     H(t) = sum_n  h_n exp(-i w_n t) + h_n^dag exp(+i w_n t),   w_n > 0.
//
// Everything is stored as H/hbar in angular-frequency units; hbar never
// appears.  Terms are kept sorted ascending by frequency and equal-frequency
// terms are merged by summing coefficients so the frequency list is unique.

#include <vector>

#include "heff/opalg.hpp"

namespace heff {

struct HarmonicTerm {
    Operator h;    // coefficient of exp(-i omega t); units of angular frequency
    double omega;  // strictly positive
};

// Equal-frequency merge tolerance (relative).
inline constexpr double kOmegaMergeRelTol = 1e-12;

// Folds a signed-frequency term onto the canonical omega > 0 form:
// (h, w>0) -> (h, w);  (h, w<0) -> (h^dag, -w).  Rejects w == 0, which
// belongs in the static Hamiltonian, not here.
HarmonicTerm normalize_term(const Operator& h, double omega_signed);

class InteractionHamiltonian {
public:
    // Sorts ascending by omega and merges equal frequencies.  An empty term
    // list is allowed and represents H = 0.
    InteractionHamiltonian(HilbertSpace space, std::vector<HarmonicTerm> terms);

    const HilbertSpace& space() const { return space_; }
    const std::vector<HarmonicTerm>& terms() const { return terms_; }
    int term_count() const { return static_cast<int>(terms_.size()); }

    double omega_min() const;  // requires at least one term
    double omega_max() const;

    // sum_n h_n e^{-i w t} + h.c.; Hermitian by construction.
    Operator evaluate(double t) const;

    // V1(t) = sum_n (1/w_n)(h_n e^{-i w t} - h.c.); anti-Hermitian.
    Operator v1(double t) const;

private:
    HilbertSpace space_;
    std::vector<HarmonicTerm> terms_;
};

struct BandwidthReport {
    double spread;       // w_N - w_1
    double floor_omega;  // w_1
    double ratio;        // spread / floor
    bool ok;             // ratio <= threshold
};

// Checks the narrow-band assumption spread << w_1.  The threshold is a
// warning level, not an error: wide-band inputs still evaluate.
BandwidthReport bandwidth_report(const InteractionHamiltonian& h, double threshold = 1.0 / 3.0);

}  // namespace heff
