#pragma once

// Builders for the worked reference systems (AC Stark shift, Bloch-Siegert
// shift, Raman transitions, quantum AC Stark shift in a trap, and the
// Molmer-Sorensen gate) together with their closed-form expected effective
// Hamiltonians.  These entries are the regression anchor tying engine output
// to the published results.
//
// Bosonic truncation: the engine's zero-beat coefficients are exact only
// below the top Fock level(s), so every entry declares the sector on which
// its expectation holds (max_valid_fock) and whether an identity offset has
// to be removed per Fock level before comparing (the trap entry: each spin
// block carries a level-independent offset that the closed form drops).

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heff/effective.hpp"
#include "heff/model.hpp"
#include "heff/propagate.hpp"

namespace heff {

struct SimulationPlan {
    double t0 = 0.0;
    double t1 = 0.0;
    double dt = 0.0;
    int psi0_index = 0;
    int store_every = 1;
    double burn_in = 0.0;
};

struct CatalogEntry {
    std::string name;
    std::vector<std::pair<std::string, double>> params;  // ordered for reports
    InteractionHamiltonian interaction;
    EffectiveHamiltonian expected_effective;
    double secular_cutoff = 0.0;        // cutoff under which the expectation holds
    bool remove_offset_per_level = false;
    int boson_factor = -1;              // -1: no bosonic mode
    int max_valid_fock = -1;            // highest Fock level compared
    SimulationPlan sim;
    std::string notes;

    double param(const std::string& key) const;
};

CatalogEntry ac_stark(double omega_rabi, double delta);
CatalogEntry bloch_siegert(double omega_rabi, double omega_carrier, double delta);
CatalogEntry raman(double omega1, double omega2, double delta1, double delta2);
CatalogEntry quantum_ac_stark(double omega_rabi, double delta, double eta, double omega0,
                              int fock_dim);
CatalogEntry ms_gate(double omega_rabi, double eta, double delta, double omega0, int fock_dim);

const std::vector<std::string>& catalog_names();

// Builds an entry by name with per-parameter overrides; unknown names or
// parameter keys raise ParseError listing the valid choices.
CatalogEntry build_entry(const std::string& name,
                         const std::map<std::string, double>& overrides = {});

// --- verification -----------------------------------------------------------

struct TermCheck {
    double freq;
    double abs_err;
    double rel_err;
    bool pass;
};

struct EntryVerification {
    bool pass = true;
    double worst_rel_err = 0.0;
    std::vector<TermCheck> terms;
};

// Runs the engine on entry.interaction, applies the entry's secular cutoff,
// restricts to the declared validity sector, removes the per-level identity
// offset where the entry says so, and compares term-by-term against
// expected_effective at rel_tol (relative Frobenius).
EntryVerification verify_entry(const CatalogEntry& entry, double rel_tol = 1e-12);

// Projector onto Fock levels 0..max_level of the given boson factor.
Operator fock_projector(const HilbertSpace& space, int boson_factor, int max_level);

// Subtracts, within each Fock level, the trace part of the block on the
// remaining factors.  Identity on entries outside levels 0..max_level.
Operator remove_per_level_offset(const Operator& op, int boson_factor, int max_level);

// --- Molmer-Sorensen gate dynamics ------------------------------------------

struct MsGateCheck {
    double chi = 0.0;
    double gate_time = 0.0;
    double state_fidelity_effective = 0.0;  // |<target|psi_eff>|^2
    double state_fidelity_exact = 0.0;      // |<target|psi_exact>|^2
    double propagator_fidelity = 0.0;       // fidelity(U_exact, U_eff) at gate time
};

// Propagates |11, n=0> to the gate time pi/(2 chi) under both the filtered
// effective Hamiltonian and the full interaction.  The exact propagator is
// composed from one finely integrated carrier period (the three carriers are
// commensurate) raised to the required power, so the check stays desk-scale.
MsGateCheck ms_gate_check(const CatalogEntry& entry);

}  // namespace heff
