#pragma once

// JSON run configuration for the command-line tool.
//
// {
//   "model":  {"hbar_omega_D": 1, "U1": 0.3, "U2": 0.3002 | "auto",
//              "potential": {"kind": "separable", "shape": "sine", "amplitude": 1}
//                         | {"kind": "constant", "value": 0.3 | "U1" | "U2"}
//                         | {"kind": "table", "x": [...], "xi": [...], "values": [[...]]}},
//   "solver": {"n_nodes", "n_T", "tau_fraction", "quad_tol", "root_tol", "fp_tol",
//              "max_iter", "seed"},
//   "output": {"directory": "out", "csv": true, "json": true, "curve_points": 201}
// }
//
// Omitted solver and output fields take their defaults; unknown keys are
// rejected. "U2": "auto" places U2 in the middle of the coupling window.

#include "bcsgap/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace bcsgap {

inline constexpr const char *kToolVersion = "bcsgap 1.0.0";

struct OutputConfig {
   std::string directory = "out";
   bool csv = true;
   bool json = true;
   int curve_points = 201;
};

struct RunConfig {
   ModelParams model;
   SolverConfig solver;
   OutputConfig output;
   bool U2_auto = false;
};

/// Throws ConfigError for malformed or out-of-range fields and ModelError for
/// an inadmissible potential.
RunConfig parse_run_config(const nlohmann::json &doc, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Reads and parses a file; IoError if it cannot be read, ConfigError if it
/// is not valid JSON.
RunConfig load_run_config(const std::string &path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Resolved model and solver settings (output settings excluded), in a fixed
/// key order.
nlohmann::json canonical_json(const RunConfig &cfg);

/// FNV-1a 64 of canonical_json(cfg).dump(), as 16 hex digits.
std::string config_hash(const RunConfig &cfg);

/// Midpoint of (U1, 1/a) for the given cutoff, U1 and tau fraction.
double auto_U2(double hbar_omega_D, double U1, const SolverConfig &solver);

} // namespace bcsgap
