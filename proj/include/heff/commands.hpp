#pragma once

// Command-layer entry points shared by the CLI binary and the tests.
// Exit-code contract: 0 ok, 2 parse error, 3 invariant violation,
// 4 numeric guard.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heff/report.hpp"

namespace heff {

struct CommonFlags {
    std::string out_dir = "out";
    std::optional<double> dt_override;
    std::optional<double> t1_override;
    std::optional<std::string> secular_override;  // "off" or a number
    std::uint64_t seed = 0;
    int jobs = 1;
    std::optional<int> store_every_override;
};

struct SweepAxis {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

// Derives the effective Hamiltonian of a model file and writes <out>/heff.json.
RunReport cmd_derive(const std::string& model_path, const CommonFlags& flags);

// Propagates the model exactly and/or under its effective Hamiltonian;
// writes populations.csv (and fidelity.csv when which == "both").
RunReport cmd_simulate(const std::string& model_path, const std::string& which,
                       const CommonFlags& flags);

// Runs a catalog entry's full pipeline: derive, compare against the closed
// form, simulate both routes, report pass/fail per invariant.  Files land in
// <out>/<entry name>/.
RunReport cmd_catalog(const std::string& name, const std::map<std::string, double>& overrides,
                      const CommonFlags& flags);

// Parameter sweep over a model's named scalars; writes <out>/sweep.csv with
// one row per grid point in grid order (first axis slowest).
RunReport cmd_sweep(const std::string& model_path, const std::vector<SweepAxis>& axes,
                    const CommonFlags& flags);

// Full argv-level entry point used by main(); maps exceptions to exit codes
// and never aborts on malformed input.
int run_cli(int argc, const char* const* argv);

}  // namespace heff
