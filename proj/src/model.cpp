#include "heff/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace heff {

HarmonicTerm normalize_term(const Operator& h, double omega_signed) {
    if (omega_signed == 0.0) {
        throw InvariantError("normalize_term: static term not harmonic (omega = 0 belongs in H0)");
    }
    if (omega_signed > 0.0) return {h, omega_signed};
    return {h.adjoint(), -omega_signed};
}

InteractionHamiltonian::InteractionHamiltonian(HilbertSpace space, std::vector<HarmonicTerm> terms)
    : space_(std::move(space)) {
    for (std::size_t n = 0; n < terms.size(); ++n) {
        if (terms[n].h.space() != space_) {
            std::ostringstream msg;
            msg << "InteractionHamiltonian: term " << n << " lives on a different space";
            throw InvariantError(msg.str());
        }
        if (!(terms[n].omega > 0.0)) {
            std::ostringstream msg;
            msg << "InteractionHamiltonian: term " << n << " has omega " << terms[n].omega
                << " (must be > 0; use normalize_term)";
            throw InvariantError(msg.str());
        }
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const HarmonicTerm& a, const HarmonicTerm& b) { return a.omega < b.omega; });
    // merge equal frequencies (coefficient sum) to keep the double sum honest
    for (const HarmonicTerm& t : terms) {
        if (!terms_.empty() &&
            t.omega - terms_.back().omega <= kOmegaMergeRelTol * std::max(t.omega, terms_.back().omega)) {
            terms_.back().h = terms_.back().h + t.h;
        } else {
            terms_.push_back(t);
        }
    }
}

double InteractionHamiltonian::omega_min() const {
    if (terms_.empty()) throw InvariantError("InteractionHamiltonian: no harmonic terms");
    return terms_.front().omega;
}

double InteractionHamiltonian::omega_max() const {
    if (terms_.empty()) throw InvariantError("InteractionHamiltonian: no harmonic terms");
    return terms_.back().omega;
}

Operator InteractionHamiltonian::evaluate(double t) const {
    Matrix rot = Matrix::Zero(space_.dim(), space_.dim());
    for (const HarmonicTerm& term : terms_) {
        rot += std::exp(Complex(0.0, -term.omega * t)) * term.h.matrix();
    }
    // adding the adjoint afterwards keeps the result Hermitian to the bit
    return Operator(space_, (rot + rot.adjoint()).eval());
}

Operator InteractionHamiltonian::v1(double t) const {
    Matrix rot = Matrix::Zero(space_.dim(), space_.dim());
    for (const HarmonicTerm& term : terms_) {
        rot += (std::exp(Complex(0.0, -term.omega * t)) / term.omega) * term.h.matrix();
    }
    return Operator(space_, (rot - rot.adjoint()).eval());
}

BandwidthReport bandwidth_report(const InteractionHamiltonian& h, double threshold) {
    if (h.term_count() < 1) {
        throw InvariantError("bandwidth_report: no harmonic terms");
    }
    BandwidthReport report;
    report.floor_omega = h.omega_min();
    report.spread = h.omega_max() - h.omega_min();
    report.ratio = report.spread / report.floor_omega;
    report.ok = report.ratio <= threshold;
    return report;
}

}  // namespace heff
