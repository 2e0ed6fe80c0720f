#pragma once

// Gap equation with a constant coupling U: the temperature-only curves
// Delta(T), their vanishing temperatures, and the auxiliary functions built on
// top of the weaker-coupling curve.

#include <cstddef>
#include <vector>

namespace bcsgap {

struct Tolerances {
   double quad_tol = 1e-12; // relative quadrature tolerance
   double root_tol = 1e-13; // relative root / residual tolerance
};

// Debye cutoff together with one constant coupling.
class CouplingProblem {
public:
   CouplingProblem(double hbar_omega_D, double U);

   double hbar_omega_D() const noexcept { return hbar_omega_D_; }
   double U() const noexcept { return U_; }

private:
   double hbar_omega_D_;
   double U_;
};

// Positive root of 2/z = tanh z, bracketed in [1, 4].
double solve_z0(double tol = 1e-13);

// hbar_omega_D / sinh(1/U): the zero-temperature gap.
double delta_at_zero(const CouplingProblem &p);

// Residual U * int_0^{hbar omega} tanh(xi / 2 tau) / xi dxi - 1.
double tau_c_residual(const CouplingProblem &p, double tau, double quad_tol);

// Vanishing temperature of the curve: root of tau_c_residual. The bracket is
// grown outward from [1e-6, 1] * hbar_omega_D.
double solve_tau_c(const CouplingProblem &p, const Tolerances &tol = {});

// Residual U * int_0^{hbar omega} tanh(s / 2T) / s dxi - 1, s = sqrt(xi^2 + delta^2).
// At T = 0 the tanh factor is exactly 1.
double gap_residual(const CouplingProblem &p, double delta, double T, double quad_tol);

/// Delta(T) for a constant coupling. Returns 0 for T >= tau_c; otherwise the
/// unique root of gap_residual in (0, delta_at_zero(p)].
double delta_curve_value(const CouplingProblem &p, double tau_c, double T,
                         const Tolerances &tol = {});

/// dDelta/dT by implicit differentiation of the gap residual; both partial
/// derivatives are quadratures of the differentiated integrand.
/// Requires 0 < T < tau_c (DomainError otherwise).
double delta_curve_derivative(const CouplingProblem &p, double tau_c, double T,
                              const Tolerances &tol = {});

// One constant-coupling curve with its vanishing temperature and T = 0 value.
class GapCurve {
public:
   // Solves tau_c for p.
   explicit GapCurve(const CouplingProblem &p, const Tolerances &tol = {});

   const CouplingProblem &problem() const noexcept { return problem_; }
   const Tolerances &tolerances() const noexcept { return tol_; }
   double tau_c() const noexcept { return tau_c_; }
   double delta0() const noexcept { return delta0_; }

   double value(double T) const { return delta_curve_value(problem_, tau_c_, T, tol_); }
   double derivative(double T) const
   {
      return delta_curve_derivative(problem_, tau_c_, T, tol_);
   }

private:
   CouplingProblem problem_;
   Tolerances tol_;
   double tau_c_;
   double delta0_;
};

// Dense read-only table of a GapCurve on [0, t_max] with monotone cubic
// (Fritsch-Carlson) interpolation. Immutable after construction, so it can be
// shared between threads.
class CurveTable {
public:
   CurveTable(const GapCurve &curve, double t_max, std::size_t n_points);

   double operator()(double T) const;
   double t_max() const noexcept { return temps_.back(); }
   const std::vector<double> &temperatures() const noexcept { return temps_; }
   const std::vector<double> &values() const noexcept { return values_; }

private:
   std::vector<double> temps_;
   std::vector<double> values_;
   std::vector<double> slopes_;
};

/// tau0 in (0, tau1) solving Delta1(tau0) = 2 z0 tau0. The left side falls and
/// the right side rises, so the root is unique.
double solve_tau0(const GapCurve &curve1, double z0, double tol = 1e-13);

/// F(T) = int tanh(s / 2 tau0) / s dxi with s = sqrt(xi^2 + Delta1(T)^2):
/// the gap integral with its temperature frozen at tau0.
double eval_F(double T, double tau0, const GapCurve &curve1);

// Same integral for a known gap value (lets callers reuse Delta1(T)).
double frozen_gap_integral(double delta, double tau0, double hbar_omega_D, double quad_tol);

// Hypotheses under which G is evaluated.
struct GDomain {
   double tau0;
   double x_min; // Delta1(tau0)^2
   double hbar_omega_D;
};

/// G(T, X, xi) = xi^2 tanh(sqrt(xi^2 + X) / 2T) + 4 X T / sqrt(xi^2 + X).
/// Throws DomainError when X < Delta1(tau0)^2, T is outside [0, tau0], or xi
/// is outside [0, hbar_omega_D].
double eval_G(const GDomain &domain, double T, double X, double xi);

} // namespace bcsgap
