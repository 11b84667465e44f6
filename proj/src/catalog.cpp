#include "heff/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Operator level_splitting(const HilbertSpace& space, int f, int upper, int lower) {
    // |upper><upper| - |lower><lower| on factor f
    return ketbra(space, f, upper, upper) - ketbra(space, f, lower, lower);
}

bool merged_frequencies(double a, double b) {
    return std::abs(a - b) <= kOmegaMergeRelTol * std::max(std::abs(a), std::abs(b));
}

Matrix matrix_power(Matrix base, long long n) {
    Matrix acc = Matrix::Identity(base.rows(), base.cols());
    while (n > 0) {
        if (n & 1) acc = (acc * base).eval();
        base = (base * base).eval();
        n >>= 1;
    }
    return acc;
}

}  // namespace

double CatalogEntry::param(const std::string& key) const {
    for (const auto& [k, v] : params) {
        if (k == key) return v;
    }
    throw InvariantError("CatalogEntry: no parameter named " + key);
}

CatalogEntry ac_stark(double omega_rabi, double delta) {
    if (delta == 0.0) throw InvariantError("ac_stark: Delta must be nonzero");
    HilbertSpace space = HilbertSpace::qudit(2);
    const Operator drive = (omega_rabi / 2.0) * ketbra(space, 0, 1, 0);  // (Omega/2)|2><1|
    InteractionHamiltonian h(space, {normalize_term(drive, delta)});

    const double shift = -omega_rabi * omega_rabi / (4.0 * delta);
    EffectiveHamiltonian expected(space, {{shift * level_splitting(space, 0, 1, 0), 0.0}},
                                  1e-9 * std::abs(delta));

    CatalogEntry e{"ac_stark",
                   {{"Omega", omega_rabi}, {"Delta", delta}},
                   std::move(h),
                   std::move(expected),
                   kInf,
                   false,
                   -1,
                   -1,
                   {},
                   "single detuned drive; static shift -(Omega^2/4 Delta)(|2><2|-|1><1|), "
                   "sign follows sign(Delta)"};
    e.sim.t1 = 400.0 / std::abs(delta);
    e.sim.dt = 0.01 / std::abs(delta);
    e.sim.psi0_index = 0;
    e.sim.store_every = 10;
    return e;
}

CatalogEntry bloch_siegert(double omega_rabi, double omega_carrier, double delta) {
    if (!(omega_carrier > 0.0)) throw InvariantError("bloch_siegert: omega_carrier must be > 0");
    if (delta < 0.0) {
        throw InvariantError(
            "bloch_siegert: Delta must be >= 0 (negative detuning is covered by ac_stark's "
            "conjugation rule)");
    }
    if (delta > 0.0 && omega_carrier <= delta) {
        throw InvariantError("bloch_siegert: needs omega_carrier > Delta");
    }
    HilbertSpace space = HilbertSpace::qudit(2);
    const Operator co = (omega_rabi / 2.0) * ketbra(space, 0, 1, 0);       // (Omega/2)|2><1|
    const Operator counter = (omega_rabi / 2.0) * ketbra(space, 0, 0, 1);  // (Omega/2)|1><2|
    std::vector<HarmonicTerm> terms;
    if (delta != 0.0) terms.push_back(normalize_term(co, delta));
    // on resonance only the counter-rotating term remains (the co-rotating
    // piece would be static and belongs in H0)
    terms.push_back(normalize_term(counter, 2.0 * omega_carrier + delta));
    InteractionHamiltonian h(space, std::move(terms));

    double shift = omega_rabi * omega_rabi / (4.0 * (2.0 * omega_carrier + delta));
    if (delta != 0.0) shift += -omega_rabi * omega_rabi / (4.0 * delta);
    EffectiveHamiltonian expected(space, {{shift * level_splitting(space, 0, 1, 0), 0.0}},
                                  1e-9 * (delta != 0.0 ? delta : omega_carrier));

    CatalogEntry e{"bloch_siegert",
                   {{"Omega", omega_rabi}, {"omega_carrier", omega_carrier}, {"Delta", delta}},
                   std::move(h),
                   std::move(expected),
                   kInf,
                   false,
                   -1,
                   -1,
                   {},
                   "counter-rotating term at 2*omega_carrier+Delta; its static shift "
                   "+(Omega^2/4)/(2w+Delta) adds to the co-rotating Stark term; cross "
                   "commutators vanish identically"};
    const double omega_max = 2.0 * omega_carrier + delta;
    e.sim.t1 = 400.0;
    e.sim.dt = 0.05 / omega_max;
    e.sim.psi0_index = 0;
    e.sim.store_every = 50;
    return e;
}

CatalogEntry raman(double omega1, double omega2, double delta1, double delta2) {
    if (!(delta1 > 0.0) || !(delta2 > 0.0)) {
        throw InvariantError("raman: Delta1 and Delta2 must be > 0");
    }
    HilbertSpace space = HilbertSpace::qudit(3);
    const Operator h1 = (omega1 / 2.0) * ketbra(space, 0, 2, 0);  // (Omega1/2)|3><1|
    const Operator h2 = (omega2 / 2.0) * ketbra(space, 0, 2, 1);  // (Omega2/2)|3><2|
    InteractionHamiltonian h(space, {{h1, delta1}, {h2, delta2}});

    const double mean = harmonic_mean(delta1, delta2);
    const double coupling = omega1 * omega2 / (4.0 * mean);
    Operator stark1 = (-omega1 * omega1 / (4.0 * delta1)) *
                      (ketbra(space, 0, 2, 2) - ketbra(space, 0, 0, 0));
    Operator stark2 = (-omega2 * omega2 / (4.0 * delta2)) *
                      (ketbra(space, 0, 2, 2) - ketbra(space, 0, 1, 1));
    std::vector<EffectiveTerm> expected_terms;
    if (merged_frequencies(delta1, delta2)) {
        expected_terms.push_back(
            {stark1 + stark2 + coupling * (ketbra(space, 0, 0, 1) + ketbra(space, 0, 1, 0)), 0.0});
    } else {
        expected_terms.push_back({stark1 + stark2, 0.0});
        // both beat coefficients carry a + sign; the pairing fixes the
        // conjugate term's sign by Hermiticity
        expected_terms.push_back({coupling * ketbra(space, 0, 0, 1), delta1 - delta2});
        expected_terms.push_back({coupling * ketbra(space, 0, 1, 0), delta2 - delta1});
    }
    EffectiveHamiltonian expected(space, std::move(expected_terms),
                                  1e-9 * std::min(delta1, delta2));

    CatalogEntry e{"raman",
                   {{"Omega1", omega1}, {"Omega2", omega2}, {"Delta1", delta1}, {"Delta2", delta2}},
                   std::move(h),
                   std::move(expected),
                   kInf,
                   false,
                   -1,
                   -1,
                   {},
                   "two detuned legs via level |3>; Stark shifts plus the |1><2| beat at "
                   "Delta1-Delta2 with coefficient Omega1*Omega2/(4*harmonic mean)"};
    // on two-photon resonance the demo runs to the full population swap;
    // detuned legs get a fixed horizon instead (the beat suppresses transfer)
    const bool resonant = merged_frequencies(delta1, delta2);
    e.sim.t1 = (resonant && coupling > 0.0) ? M_PI / (2.0 * coupling)
                                            : 400.0 / std::min(delta1, delta2);
    e.sim.dt = 0.04 / std::max(delta1, delta2);
    e.sim.psi0_index = 0;
    e.sim.store_every = std::max(1, static_cast<int>(e.sim.t1 / e.sim.dt) / 4000);
    e.sim.burn_in = 250.0 / std::min(delta1, delta2);
    return e;
}

CatalogEntry quantum_ac_stark(double omega_rabi, double delta, double eta, double omega0,
                              int fock_dim) {
    if (!(delta > omega0) || !(omega0 > 0.0)) {
        throw InvariantError("quantum_ac_stark: needs Delta > omega0 > 0");
    }
    if (eta < 0.0 || eta > 0.2) {
        throw InvariantError("quantum_ac_stark: eta must lie in [0, 0.2] (Lamb-Dicke regime)");
    }
    if (fock_dim < 4) {
        throw InvariantError("quantum_ac_stark: fock_dim must be >= 4 (3-level truncation guard)");
    }
    HilbertSpace space({{FactorKind::Qudit, 2}, {FactorKind::Boson, fock_dim}});
    const Operator sp = ketbra(space, 0, 1, 0);  // |2><1| on the internal state
    const Operator a = ladder(space, 1, LadderKind::Lower);
    const Operator ad = ladder(space, 1, LadderKind::Raise);
    const Complex sideband(0.0, eta * omega_rabi / 2.0);
    InteractionHamiltonian h(space, {
                                        {sideband * (sp * ad), delta - omega0},
                                        {(omega_rabi / 2.0) * sp, delta},
                                        {sideband * (sp * a), delta + omega0},
                                    });

    // -(Omega^2/4D)(1 + 2 eta^2 D^2/(D^2-w0^2)(n+1/2)) (|2><2|-|1><1|)
    const double base = -omega_rabi * omega_rabi / (4.0 * delta);
    const double motional = eta * eta * delta * delta / (delta * delta - omega0 * omega0);
    const Operator z = level_splitting(space, 0, 1, 0);
    const Operator n_op = number_op(space, 1);
    EffectiveHamiltonian expected(
        space, {{base * (1.0 + motional) * z + (2.0 * base * motional) * (z * n_op), 0.0}},
        1e-9 * (delta - omega0));

    CatalogEntry e{"quantum_ac_stark",
                   {{"Omega", omega_rabi},
                    {"Delta", delta},
                    {"eta", eta},
                    {"omega0", omega0},
                    {"fock_dim", static_cast<double>(fock_dim)}},
                   std::move(h),
                   std::move(expected),
                   omega0 / 2.0,
                   true,
                   1,
                   fock_dim - 3,
                   {},
                   "trapped-ion shift dependent on the motional population; the engine "
                   "additionally produces an identity offset +(eta^2 Omega^2/4) w0/(D^2-w0^2) "
                   "per Fock level and beats at +-w0, +-2w0 dropped by the cutoff"};
    e.sim.t1 = 200.0 / delta;
    e.sim.dt = 0.05 / (delta + omega0);
    e.sim.psi0_index = 1;  // |1, n=1>
    e.sim.store_every = 2;
    return e;
}

CatalogEntry ms_gate(double omega_rabi, double eta, double delta, double omega0, int fock_dim) {
    if (!(omega0 > 0.0) || !(delta > omega0)) {
        // the closed-form pole structure assumes delta > omega0; re-normalizing
        // the negative frequency is left to direct model-module use
        throw InvariantError("ms_gate: needs delta > omega0 > 0");
    }
    if (eta < 0.0) throw InvariantError("ms_gate: eta must be >= 0");
    if (fock_dim < 3) throw InvariantError("ms_gate: fock_dim must be >= 3");
    HilbertSpace space({{FactorKind::Qudit, 2}, {FactorKind::Qudit, 2}, {FactorKind::Boson, fock_dim}});
    const std::vector<int> ions{0, 1};
    const Operator jx = collective_spin(space, ions, SpinAxis::X);
    const Operator jy = collective_spin(space, ions, SpinAxis::Y);
    const Operator a = ladder(space, 2, LadderKind::Lower);
    const Operator ad = ladder(space, 2, LadderKind::Raise);
    InteractionHamiltonian h(space, {
                                        {(omega_rabi / 2.0) * jx, delta},
                                        {(-eta * omega_rabi / 2.0) * (a * jy), delta + omega0},
                                        {(-eta * omega_rabi / 2.0) * (jy * ad), delta - omega0},
                                    });

    const double chi = (eta * eta * omega_rabi * omega_rabi / 4.0) *
                       (2.0 * omega0 / ((delta - omega0) * (delta + omega0)));
    EffectiveHamiltonian expected(space, {{chi * (jy * jy), 0.0}}, 1e-9 * (delta - omega0));

    CatalogEntry e{"ms_gate",
                   {{"Omega", omega_rabi},
                    {"eta", eta},
                    {"delta", delta},
                    {"omega0", omega0},
                    {"fock_dim", static_cast<double>(fock_dim)}},
                   std::move(h),
                   std::move(expected),
                   omega0 / 2.0,
                   false,
                   2,
                   fock_dim - 2,
                   {},
                   "bichromatic drive; [h1,h1]=0 (Jx Hermitian), the sideband pair leaves "
                   "chi Jy^2 with chi = (eta^2 Omega^2/4) 2w0/((d-w0)(d+w0)); exact on Fock "
                   "levels below the truncation edge where [a,a+]=1"};
    e.sim.t1 = 2.0 * (2.0 * M_PI / (delta - omega0));
    e.sim.dt = 0.05 / (delta + omega0);
    e.sim.psi0_index = 0;  // |11, n=0>
    e.sim.store_every = 5;
    return e;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"ac_stark", "bloch_siegert", "raman",
                                                "quantum_ac_stark", "ms_gate"};
    return names;
}

namespace {

CatalogEntry build_with_defaults(const std::string& name, std::map<std::string, double> p) {
    if (name == "ac_stark") return ac_stark(p["Omega"], p["Delta"]);
    if (name == "bloch_siegert") return bloch_siegert(p["Omega"], p["omega_carrier"], p["Delta"]);
    if (name == "raman") return raman(p["Omega1"], p["Omega2"], p["Delta1"], p["Delta2"]);
    if (name == "quantum_ac_stark") {
        return quantum_ac_stark(p["Omega"], p["Delta"], p["eta"], p["omega0"],
                                static_cast<int>(std::lround(p["fock_dim"])));
    }
    if (name == "ms_gate") {
        return ms_gate(p["Omega"], p["eta"], p["delta"], p["omega0"],
                       static_cast<int>(std::lround(p["fock_dim"])));
    }
    std::ostringstream msg;
    msg << "unknown catalog entry '" << name << "'; valid names:";
    for (const auto& n : catalog_names()) msg << " " << n;
    throw ParseError(msg.str());
}

std::map<std::string, double> default_params(const std::string& name) {
    if (name == "ac_stark") return {{"Omega", 0.1}, {"Delta", 1.0}};
    if (name == "bloch_siegert") return {{"Omega", 0.05}, {"omega_carrier", 10.0}, {"Delta", 0.5}};
    if (name == "raman") {
        return {{"Omega1", 0.05}, {"Omega2", 0.05}, {"Delta1", 1.0}, {"Delta2", 1.0}};
    }
    if (name == "quantum_ac_stark") {
        return {{"Omega", 0.02}, {"Delta", 1.0}, {"eta", 0.1}, {"omega0", 0.3}, {"fock_dim", 8.0}};
    }
    if (name == "ms_gate") {
        return {{"Omega", 0.02}, {"eta", 0.1}, {"delta", 1.1}, {"omega0", 1.0}, {"fock_dim", 6.0}};
    }
    std::ostringstream msg;
    msg << "unknown catalog entry '" << name << "'; valid names:";
    for (const auto& n : catalog_names()) msg << " " << n;
    throw ParseError(msg.str());
}

}  // namespace

CatalogEntry build_entry(const std::string& name, const std::map<std::string, double>& overrides) {
    auto params = default_params(name);
    for (const auto& [key, value] : overrides) {
        auto it = params.find(key);
        if (it == params.end()) {
            std::ostringstream msg;
            msg << "catalog entry '" << name << "' has no parameter '" << key << "'; valid keys:";
            for (const auto& [k, v] : params) msg << " " << k;
            throw ParseError(msg.str());
        }
        it->second = value;
    }
    return build_with_defaults(name, std::move(params));
}

Operator fock_projector(const HilbertSpace& space, int boson_factor, int max_level) {
    const Factor& fac = space.factor(boson_factor);
    if (fac.kind != FactorKind::Boson) {
        throw InvariantError("fock_projector: factor is not a boson factor");
    }
    Matrix local = Matrix::Zero(fac.dim, fac.dim);
    for (int n = 0; n <= std::min(max_level, fac.dim - 1); ++n) local(n, n) = 1.0;
    return embed(space, boson_factor, local);
}

Operator remove_per_level_offset(const Operator& op, int boson_factor, int max_level) {
    const HilbertSpace& space = op.space();
    const int d_rest = space.dim() / space.factor(boson_factor).dim;
    Operator out = op;
    for (int n = 0; n <= std::min(max_level, space.factor(boson_factor).dim - 1); ++n) {
        Matrix local = Matrix::Zero(space.factor(boson_factor).dim, space.factor(boson_factor).dim);
        local(n, n) = 1.0;
        const Operator pn = embed(space, boson_factor, local);
        const Complex level_trace = (pn * out * pn).trace();
        out = out - (level_trace / static_cast<double>(d_rest)) * pn;
    }
    return out;
}

EntryVerification verify_entry(const CatalogEntry& entry, double rel_tol) {
    const EffectiveHamiltonian engine =
        secular_filter(james_jerke(entry.interaction), entry.secular_cutoff);
    const double tol =
        std::max(engine.freq_tol(), entry.expected_effective.freq_tol());

    auto engine_terms = engine.terms();
    auto expected_terms = entry.expected_effective.terms();

    double scale = 0.0;
    for (const auto& t : expected_terms) scale = std::max(scale, frobenius_norm(t.coeff));
    const double zero_floor = 1e-14 * std::max(1.0, scale);

    std::optional<Operator> projector;
    if (entry.boson_factor >= 0) {
        projector = fock_projector(entry.interaction.space(), entry.boson_factor,
                                   entry.max_valid_fock);
    }
    auto restricted = [&](const Operator& coeff, double freq) {
        Operator c = projector ? (*projector * coeff * *projector) : coeff;
        if (entry.remove_offset_per_level && std::abs(freq) <= tol) {
            c = remove_per_level_offset(c, entry.boson_factor, entry.max_valid_fock);
        }
        return c;
    };

    // union of beat frequencies present on either side (zero-norm groups skipped)
    std::vector<double> freqs;
    auto add_freq = [&](double f, double norm) {
        if (norm <= zero_floor) return;
        for (double g : freqs) {
            if (std::abs(g - f) <= tol) return;
        }
        freqs.push_back(f);
    };
    for (const auto& t : engine_terms) add_freq(t.freq, frobenius_norm(restricted(t.coeff, t.freq)));
    for (const auto& t : expected_terms) {
        add_freq(t.freq, frobenius_norm(restricted(t.coeff, t.freq)));
    }
    std::sort(freqs.begin(), freqs.end());

    auto find_coeff = [&](const std::vector<EffectiveTerm>& terms, double f) {
        for (const auto& t : terms) {
            if (std::abs(t.freq - f) <= tol) return t.coeff;
        }
        return Operator::zero(entry.interaction.space());
    };

    EntryVerification v;
    for (double f : freqs) {
        const Operator eng = restricted(find_coeff(engine_terms, f), f);
        const Operator exp = restricted(find_coeff(expected_terms, f), f);
        TermCheck check;
        check.freq = f;
        check.abs_err = frobenius_norm(eng - exp);
        const double denom = std::max(frobenius_norm(exp), scale > 0.0 ? scale : 1.0);
        check.rel_err = check.abs_err / denom;
        check.pass = check.rel_err <= rel_tol;
        v.worst_rel_err = std::max(v.worst_rel_err, check.rel_err);
        v.pass = v.pass && check.pass;
        v.terms.push_back(check);
    }
    return v;
}

MsGateCheck ms_gate_check(const CatalogEntry& entry) {
    const double delta = entry.param("delta");
    const double omega0 = entry.param("omega0");
    const int fock_dim = static_cast<int>(std::lround(entry.param("fock_dim")));
    const HilbertSpace& space = entry.interaction.space();
    const int d = space.dim();

    // integrates [t0, t1] storing only the endpoint
    auto final_unitary = [](const auto& source, double t1, double dt_max) {
        PropagateOptions opts;
        opts.store_every = static_cast<int>(std::ceil(t1 / dt_max - 1e-9));
        const PropagationResult r = propagate(source, 0.0, t1, dt_max, opts);
        return r.unitaries.sample(r.unitaries.size() - 1).matrix();
    };

    const EffectiveHamiltonian filtered =
        secular_filter(james_jerke(entry.interaction), entry.secular_cutoff);
    const double chi = (entry.param("eta") * entry.param("eta") * entry.param("Omega") *
                        entry.param("Omega") / 4.0) *
                       (2.0 * omega0 / ((delta - omega0) * (delta + omega0)));
    const double t_gate = M_PI / (2.0 * chi);

    // effective propagation (static after the filter, so steps are free)
    const Matrix u_eff = final_unitary(filtered, t_gate, t_gate / 1024.0);

    // exact propagation: one carrier period integrated finely, then powered
    const double period = 2.0 * M_PI / (delta - omega0);
    const double dt_max = 0.05 / (delta + omega0);
    const long long n_periods = static_cast<long long>(std::floor(t_gate / period));
    const double remainder = t_gate - static_cast<double>(n_periods) * period;

    Matrix u_exact =
        matrix_power(final_unitary(entry.interaction, period, dt_max), n_periods);
    if (remainder > 1e-9 * period) {
        u_exact = (final_unitary(entry.interaction, remainder, dt_max) * u_exact).eval();
    }

    // closed-form maximally entangled target: ((1-i)|11,0> + (1+i)|22,0>)/2
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(d);
    psi0(0) = 1.0;
    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(d);
    target(0) = Complex(0.5, -0.5);
    target(3 * fock_dim) = Complex(0.5, 0.5);

    MsGateCheck check;
    check.chi = chi;
    check.gate_time = t_gate;
    const Eigen::VectorXcd psi_eff = u_eff * psi0;
    const Eigen::VectorXcd psi_exact = u_exact * psi0;
    check.state_fidelity_effective = std::norm(target.dot(psi_eff));
    check.state_fidelity_exact = std::norm(target.dot(psi_exact));
    check.propagator_fidelity =
        fidelity(Operator(space, u_exact), Operator(space, u_eff));
    return check;
}

}  // namespace heff
