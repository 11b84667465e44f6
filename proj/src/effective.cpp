#include "heff/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace heff {

double harmonic_mean(double omega_m, double omega_n) {
    return 2.0 / (1.0 / omega_m + 1.0 / omega_n);
}

namespace {

// Indices of raw terms grouped by beat frequency within tol, groups ordered
// by ascending representative frequency, members in original (m,n) order.
std::vector<std::vector<std::size_t>> group_by_freq(const std::vector<RawEffectiveTerm>& raw,
                                                    double tol) {
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a].freq < raw[b].freq; });
    std::vector<std::vector<std::size_t>> groups;
    double group_start = 0.0;
    for (std::size_t idx : order) {
        if (groups.empty() || raw[idx].freq - group_start > tol) {
            groups.push_back({idx});
            group_start = raw[idx].freq;
        } else {
            groups.back().push_back(idx);
        }
    }
    for (auto& g : groups) std::sort(g.begin(), g.end());
    return groups;
}

void check_pairing(const HilbertSpace& space, const std::vector<RawEffectiveTerm>& raw, double tol) {
    auto groups = group_by_freq(raw, tol);
    std::vector<double> freqs;
    std::vector<Matrix> coeffs;
    double scale = 0.0;
    for (const auto& g : groups) {
        Matrix sum = Matrix::Zero(space.dim(), space.dim());
        for (std::size_t idx : g) sum += raw[idx].coeff.matrix();
        freqs.push_back(raw[g.front()].freq);
        coeffs.push_back(std::move(sum));
        scale = std::max(scale, coeffs.back().norm());
    }
    const double bound = 1e-12 * std::max(1.0, scale);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        bool paired = false;
        for (std::size_t j = 0; j < freqs.size(); ++j) {
            if (std::abs(freqs[i] + freqs[j]) <= tol) {
                if ((coeffs[j] - coeffs[i].adjoint()).norm() <= bound) paired = true;
                break;
            }
        }
        if (!paired && coeffs[i].norm() > bound) {
            std::ostringstream msg;
            msg << "EffectiveHamiltonian: no Hermitian partner for beat frequency " << freqs[i];
            throw InvariantError(msg.str());
        }
    }
}

}  // namespace

EffectiveHamiltonian::EffectiveHamiltonian(HilbertSpace space, std::vector<EffectiveTerm> terms,
                                           double freq_tol)
    : space_(std::move(space)), freq_tol_(freq_tol) {
    raw_.reserve(terms.size());
    for (auto& t : terms) {
        if (t.coeff.space() != space_) {
            throw InvariantError("EffectiveHamiltonian: term lives on a different space");
        }
        raw_.push_back({-1, -1, t.freq, std::move(t.coeff)});
    }
    check_pairing(space_, raw_, freq_tol_);
}

EffectiveHamiltonian EffectiveHamiltonian::from_raw(HilbertSpace space,
                                                    std::vector<RawEffectiveTerm> raw,
                                                    double freq_tol) {
    EffectiveHamiltonian e{std::move(space), {}, freq_tol};
    e.raw_ = std::move(raw);
    for (const auto& t : e.raw_) {
        if (t.coeff.space() != e.space_) {
            throw InvariantError("EffectiveHamiltonian: term lives on a different space");
        }
    }
    check_pairing(e.space_, e.raw_, freq_tol);
    return e;
}

std::vector<EffectiveTerm> EffectiveHamiltonian::terms() const {
    std::vector<EffectiveTerm> out;
    for (const auto& g : group_by_freq(raw_, freq_tol_)) {
        Matrix sum = Matrix::Zero(space_.dim(), space_.dim());
        for (std::size_t idx : g) sum += raw_[idx].coeff.matrix();
        out.push_back({Operator(space_, std::move(sum)), raw_[g.front()].freq});
    }
    return out;
}

Operator EffectiveHamiltonian::evaluate(double t) const {
    Matrix sum = Matrix::Zero(space_.dim(), space_.dim());
    for (const EffectiveTerm& term : terms()) {
        sum += std::exp(Complex(0.0, term.freq * t)) * term.coeff.matrix();
    }
    return Operator(space_, std::move(sum));
}

Operator EffectiveHamiltonian::static_part() const {
    for (const EffectiveTerm& term : terms()) {
        if (std::abs(term.freq) <= freq_tol_) return term.coeff;
    }
    return Operator::zero(space_);
}

double EffectiveHamiltonian::max_abs_freq() const {
    double m = 0.0;
    for (const auto& t : raw_) m = std::max(m, std::abs(t.freq));
    return m;
}

EffectiveHamiltonian james_jerke(const InteractionHamiltonian& h) {
    const int n_terms = h.term_count();
    std::vector<RawEffectiveTerm> raw;
    raw.reserve(static_cast<std::size_t>(n_terms) * static_cast<std::size_t>(n_terms));
    std::vector<Matrix> adjoints;
    adjoints.reserve(static_cast<std::size_t>(n_terms));
    for (const HarmonicTerm& t : h.terms()) adjoints.push_back(t.h.matrix().adjoint().eval());
    for (int m = 0; m < n_terms; ++m) {
        const HarmonicTerm& tm = h.terms()[static_cast<std::size_t>(m)];
        for (int n = 0; n < n_terms; ++n) {
            const HarmonicTerm& tn = h.terms()[static_cast<std::size_t>(n)];
            const double inv_mean = 0.5 * (1.0 / tm.omega + 1.0 / tn.omega);
            Matrix comm = adjoints[static_cast<std::size_t>(m)] * tn.h.matrix() -
                          tn.h.matrix() * adjoints[static_cast<std::size_t>(m)];
            raw.push_back({m, n, tm.omega - tn.omega,
                           Operator(h.space(), (inv_mean * comm).eval())});
        }
    }
    const double tol = n_terms > 0 ? 1e-9 * h.omega_min() : 1e-9;
    return EffectiveHamiltonian::from_raw(h.space(), std::move(raw), tol);
}

EffectiveHamiltonian secular_filter(const EffectiveHamiltonian& e, double cutoff) {
    if (cutoff < 0.0) throw InvariantError("secular_filter: cutoff must be >= 0");
    std::vector<RawEffectiveTerm> kept;
    for (const auto& t : e.raw_terms()) {
        if (std::abs(t.freq) <= cutoff) kept.push_back(t);
    }
    return EffectiveHamiltonian::from_raw(e.space(), std::move(kept), e.freq_tol());
}

EffectiveHamiltonian remove_identity_offset(const EffectiveHamiltonian& e) {
    const double d = static_cast<double>(e.space().dim());
    std::vector<RawEffectiveTerm> out = e.raw_terms();
    for (auto& t : out) {
        if (std::abs(t.freq) <= e.freq_tol()) {
            const Complex offset = t.coeff.trace() / d;
            t.coeff = t.coeff - offset * Operator::identity(e.space());
        }
    }
    return EffectiveHamiltonian::from_raw(e.space(), std::move(out), e.freq_tol());
}

}  // namespace heff
