#include "bcsgap/lipschitz_bounds.hpp"

#include "bcsgap/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bcsgap {

namespace {

double literal_gap_integral(double delta, double T, double hbar, double quad_tol)
{
   const auto integrand = [delta, T](double xi) {
      const double s = std::hypot(xi, delta);
      if (T == 0.0)
         return 1.0 / s;
      return numerics::safe_tanh(s / (2.0 * T)) / s;
   };
   return numerics::integrate(integrand, numerics::Interval(0.0, hbar), quad_tol);
}

std::string window_message(const CouplingWindowReport &r)
{
   std::ostringstream out;
   out.precision(17);
   out << "coupling window violated: U2 * a = " << r.U2a << " >= 1 (a = " << r.a
       << "); reduce U2 below " << r.max_U2 << " or reduce tau";
   return out.str();
}

} // namespace

AEstimate compute_a_estimate(const GapCurve &curve1, double tau, double tau0, std::size_t n_grid,
                             AReading reading)
{
   if (!(tau > 0.0 && tau < tau0))
      throw DomainError("compute_a: requires 0 < tau < tau0");
   if (n_grid < 2)
      throw PreconditionError("compute_a: grid needs at least two points");

   const double hbar = curve1.problem().hbar_omega_D();
   const double quad_tol = curve1.tolerances().quad_tol;

   // The fine grid contains every coarse point, so each Delta1(T) is solved once.
   const std::size_t n_fine = 2 * n_grid - 1;
   AEstimate est;
   est.value = -1.0;
   est.refined_value = -1.0;
   for (std::size_t k = 0; k < n_fine; ++k) {
      const double T = tau * static_cast<double>(k) / static_cast<double>(n_fine - 1);
      const double delta = curve1.value(T);
      const double v = reading == AReading::FrozenTau0
                           ? frozen_gap_integral(delta, tau0, hbar, quad_tol)
                           : literal_gap_integral(delta, T, hbar, quad_tol);
      if (k % 2 == 0 && v > est.value) {
         est.value = v;
         est.argmax = T;
      }
      est.refined_value = std::max(est.refined_value, v);
   }
   est.refined_change = std::fabs(est.refined_value - est.value) / est.value;
   return est;
}

double compute_b_from_gap(double tau, double delta_tau, double hbar_omega_D)
{
   if (!(delta_tau > 0.0))
      throw DomainError("compute_b: Delta1(tau) must be positive");
   return 32.0 * tau * tau / (delta_tau * delta_tau) * std::atan(hbar_omega_D / delta_tau);
}

double compute_b(const GapCurve &curve1, double tau)
{
   if (!(tau > 0.0 && tau < curve1.tau_c()))
      throw DomainError("compute_b: requires 0 < tau < tau1");
   return compute_b_from_gap(tau, curve1.value(tau), curve1.problem().hbar_omega_D());
}

CouplingWindowError::CouplingWindowError(const CouplingWindowReport &report)
    : ModelError(window_message(report)), report_(report)
{
}

CouplingWindowReport check_coupling_window(double U2, double a)
{
   CouplingWindowReport r;
   r.U2 = U2;
   r.a = a;
   r.U2a = U2 * a;
   r.margin = 1.0 - r.U2a;
   r.max_U2 = 1.0 / a;
   // Margins within a few ulps of zero count as violated: U2 = 1/a is the boundary.
   r.satisfied = r.margin > 8.0 * std::numeric_limits<double>::epsilon();
   return r;
}

double compute_gamma(double a, double b, double U2)
{
   if (!(a > 0.0) || !(b > 0.0) || !(U2 > 0.0))
      throw PreconditionError("compute_gamma: a, b and U2 must be positive");
   const auto report = check_coupling_window(U2, a);
   if (!report.satisfied)
      throw CouplingWindowError(report);
   return U2 * b / report.margin;
}

CouplingWindowReport check_coupling_window(const ModelParams &params, double tau, const Tolerances &tol)
{
   const GapCurve curve1(CouplingProblem(params.hbar_omega_D(), params.U1()), tol);
   const double tau0 = solve_tau0(curve1, solve_z0(tol.root_tol), tol.root_tol);
   return check_coupling_window(params.U2(), compute_a(curve1, tau, tau0));
}

BoundConstants compute_bounds(const GapCurve &curve1, double tau0, double tau, double U2)
{
   BoundConstants out;
   out.tau = tau;
   out.a = compute_a(curve1, tau, tau0);
   out.b = compute_b(curve1, tau);
   out.gamma = compute_gamma(out.a, out.b, U2);
   return out;
}

} // namespace bcsgap
