#pragma once

// Conformance checks of computed curves, constants and surfaces against the
// qualitative statements they must satisfy. Each check reports its worst
// violation next to an explicit slack built from the contributing tolerances.

#include "bcsgap/gap_solver.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bcsgap {

struct CheckLocation {
   double T = 0.0;
   double x = 0.0;
};

enum class CheckStatus { Evaluated, Skipped, Errored };

struct CheckResult {
   std::string check_id;
   std::string paper_anchor;
   bool passed = false;
   double worst_violation = 0.0; // >= 0; for Evaluated, passed <=> worst_violation <= slack
   double slack = 0.0;
   std::optional<CheckLocation> location;
   CheckStatus status = CheckStatus::Evaluated;
   std::string note;
};

CheckResult make_check(std::string id, std::string anchor, double worst, double slack,
                       std::optional<CheckLocation> location = std::nullopt);

// Uniform doubles in [0, 1) from mt19937_64, platform independent.
class SeededUniform {
public:
   explicit SeededUniform(std::uint64_t seed) : engine_(seed) {}
   double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
   std::mt19937_64 engine_;
};

/// Random element of the band: lambda(x) d1 + (1 - lambda(x)) d2 with lambda
/// piecewise linear through seeded uniform knots.
std::vector<double> band_sample(SeededUniform &rng, const std::vector<double> &nodes, double d1, double d2,
                                int knots = 8);

/// Delta1(T) <= u <= Delta2(T) at every grid point; slack is the largest
/// enclosure width plus curve_tol.
CheckResult check_bracketing(const GapSurface &surface, double curve_tol);

/// 0 <= u(T, x) - u(T', x) <= gamma (T' - T) for adjacent temperatures, slack
/// twice the largest enclosure width.
CheckResult check_monotone_lipschitz(const GapSurface &surface);

/// Solves the surface for a constant potential and compares it with the
/// scalar curve of that coupling; slack 10 (fp_tol + root_tol).
CheckResult check_constant_equivalence(const ModelParams &params, const SolverConfig &cfg);

/// sup|Au - Av| <= (U2/U1) sup|u - v| + 1e-10 for seeded random band pairs.
CheckResult check_operator_bound(const GapProblem &problem, double T, int trials, std::uint64_t seed);

/// Every registered check, sorted by check_id. Never throws for a failing or
/// erroring check; a violated coupling window skips everything else.
std::vector<CheckResult> run_all(const ModelParams &params, const SolverConfig &cfg);

// Ids run_all produces, sorted.
const std::vector<std::string> &registered_checks();

bool all_passed(const std::vector<CheckResult> &results);

} // namespace bcsgap
