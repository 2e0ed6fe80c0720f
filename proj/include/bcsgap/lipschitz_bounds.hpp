#pragma once

// The constants a, b and gamma that bound how fast the gap can fall with
// temperature on [0, tau], and the admissible window 1 > U2 a for U2.

#include "bcsgap/constant_gap.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/model.hpp"

#include <cstddef>

namespace bcsgap {

// Which temperature sits inside the tanh of the `a` integrand. The frozen
// tau0 form is the one every bound uses; the literal-2T form is a diagnostic
// only (it makes U1 a = 1 identically).
enum class AReading { FrozenTau0, Literal2T };

struct AEstimate {
   double value = 0.0;          // max of the integrand family over the grid
   double argmax = 0.0;         // temperature attaining it
   double refined_value = 0.0;  // same max on a grid twice as fine
   double refined_change = 0.0; // |refined_value - value| / value
};

/// Grid maximum over T in [0, tau] of F(T) (or its literal-2T variant), on
/// `n_grid` uniform points plus one doubling as a convergence check.
AEstimate compute_a_estimate(const GapCurve &curve1, double tau, double tau0,
                             std::size_t n_grid = 256, AReading reading = AReading::FrozenTau0);

inline double compute_a(const GapCurve &curve1, double tau, double tau0)
{
   return compute_a_estimate(curve1, tau, tau0).refined_value;
}

// b = 32 tau^2 / Delta1(tau)^2 * arctan(hbar_omega_D / Delta1(tau)).
double compute_b(const GapCurve &curve1, double tau);
double compute_b_from_gap(double tau, double delta_tau, double hbar_omega_D);

struct CouplingWindowReport {
   double U2 = 0.0;
   double a = 0.0;
   double U2a = 0.0;
   double margin = 0.0; // 1 - U2 a
   double max_U2 = 0.0; // 1 / a
   bool satisfied = false;
};

class CouplingWindowError : public ModelError {
public:
   explicit CouplingWindowError(const CouplingWindowReport &report);
   const CouplingWindowReport &report() const noexcept { return report_; }

private:
   CouplingWindowReport report_;
};

/// gamma = U2 b / (1 - U2 a). Throws CouplingWindowError if U2 a >= 1.
double compute_gamma(double a, double b, double U2);

CouplingWindowReport check_coupling_window(double U2, double a);

// Full evaluation from the model: builds Delta1, z0 and tau0, then a at tau.
CouplingWindowReport check_coupling_window(const ModelParams &params, double tau,
                                           const Tolerances &tol = {});

struct BoundConstants {
   double tau = 0.0;
   double a = 0.0;
   double b = 0.0;
   double gamma = 0.0;
};

// Throws CouplingWindowError when U2 lies outside the window.
BoundConstants compute_bounds(const GapCurve &curve1, double tau0, double tau, double U2);

} // namespace bcsgap
