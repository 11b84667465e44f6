#pragma once

// JSON model files.  Schema:
//
// {
//   "name": "ac_stark",
//   "params": {"Omega": 0.05, "Delta": 1.0},            // optional scalars
//   "space": [{"kind": "qudit", "dim": 2}, ...],
//   "operators": {
//     "drive": "scale([0.025, 0], ketbra(0, 1, 0))",    // expression, or an
//     "m": [[[0,0],[1,0]],[[0,0],[0,0]]]                 // explicit matrix
//   },
//   "terms": [{"op": "drive", "omega": "Delta"}, ...],  // omega: number|param
//   "simulation": {"t0": 0, "t1": 400, "dt": 0.01,
//                  "psi0": 0, "store_every": 10, "burn_in": 0},  // optional
//   "kernel": {"tau": "auto"},                          // or a number
//   "secular_cutoff": 0.5                               // number | "off"
// }
//
// Expression grammar (prefix calls): scale(c, op), mul(a, b), add(a, b),
// adjoint(a), ketbra(f, i, j), lower(f), raise(f), jx(f...), jy(f...),
// jplus(f...).  Scalars are [re, im], a bare real literal, or a param name.
// Operator names defined earlier in "operators" may be referenced.

#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "heff/model.hpp"

namespace heff {

struct ModelFile {
    std::string name;
    std::map<std::string, double> params;
    HilbertSpace space;
    std::map<std::string, Operator> operators;
    InteractionHamiltonian interaction;

    double t0 = 0.0;
    double t1 = 100.0;
    double dt = 0.0;  // 0: derive from omega_max at load time
    Eigen::VectorXcd psi0;
    int store_every = 1;
    double burn_in = 0.0;

    bool kernel_auto = true;
    std::optional<double> kernel_tau;       // explicit tau when not auto
    std::optional<double> secular_cutoff;   // nullopt: "off"
};

// Loads and validates a model file; throws ParseError with field context on
// malformed input and InvariantError when the resulting model violates the
// harmonic-term contracts.  param_overrides replaces named scalars before
// any expression is evaluated (the sweep hook).
ModelFile load_model_file(const std::string& path,
                          const std::map<std::string, double>& param_overrides = {});

// Expression evaluator used for the "operators" and "terms" tables.
Operator parse_operator_expr(const std::string& expr, const HilbertSpace& space,
                             const std::map<std::string, Operator>& named,
                             const std::map<std::string, double>& params);

}  // namespace heff
