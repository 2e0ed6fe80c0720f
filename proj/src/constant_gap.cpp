#include "bcsgap/constant_gap.hpp"

#include "bcsgap/errors.hpp"
#include "bcsgap/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bcsgap {

using numerics::Interval;
using numerics::safe_tanh;

namespace {

// Lower end of every Delta bracket, relative to Delta(0).
constexpr double kDeltaFloor = 1e-12;

// tanh(s / 2T) / s, with the T = 0 and s = 0 limits written out.
double gap_kernel(double s, double T)
{
   if (T == 0.0)
      return 1.0 / s;
   if (s == 0.0)
      return 1.0 / (2.0 * T);
   return safe_tanh(s / (2.0 * T)) / s;
}

// sech^2(a) / sech^2(b) for a >= b >= 0, without overflow.
double sech2_ratio(double a, double b)
{
   const double ea = std::exp(-2.0 * a);
   const double eb = std::exp(-2.0 * b);
   const double r = (1.0 + eb) / (1.0 + ea);
   return std::exp(2.0 * (b - a)) * r * r;
}

} // namespace

CouplingProblem::CouplingProblem(double hbar_omega_D, double U) : hbar_omega_D_(hbar_omega_D), U_(U)
{
   if (!std::isfinite(hbar_omega_D) || !(hbar_omega_D > 0.0))
      throw DomainError("hbar_omega_D must be finite and positive");
   if (!std::isfinite(U) || !(U > 0.0))
      throw DomainError("coupling U must be finite and positive");
}

double solve_z0(double tol)
{
   if (!(tol > 0.0))
      throw PreconditionError("solve_z0: tol must be positive");
   // z tanh z - 2 is increasing on z > 0 and changes sign inside [1, 4].
   return numerics::find_root([](double z) { return z * std::tanh(z) - 2.0; }, Interval(1.0, 4.0),
                              tol);
}

double delta_at_zero(const CouplingProblem &p)
{
   return p.hbar_omega_D() / std::sinh(1.0 / p.U());
}

double tau_c_residual(const CouplingProblem &p, double tau, double quad_tol)
{
   const auto integrand = [tau](double xi) { return gap_kernel(xi, tau); };
   return p.U() * numerics::integrate(integrand, Interval(0.0, p.hbar_omega_D()), quad_tol) - 1.0;
}

double solve_tau_c(const CouplingProblem &p, const Tolerances &tol)
{
   const double scale = p.hbar_omega_D();
   double lo = 1e-6 * scale;
   double hi = scale;

   // The residual falls from +inf (log divergence) at tau -> 0 to -1 as tau -> inf.
   int guard = 0;
   while (tau_c_residual(p, lo, tol.quad_tol) <= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++guard > 200)
         throw NonConvergenceError("solve_tau_c: cannot bracket from below", lo, hi - lo);
   }
   while (tau_c_residual(p, hi, tol.quad_tol) >= 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 200)
         throw NonConvergenceError("solve_tau_c: cannot bracket from above", hi, hi - lo);
   }

   const auto f = [&](double tau) { return tau_c_residual(p, tau, tol.quad_tol); };
   return numerics::find_root(f, Interval(lo, hi), tol.root_tol * lo);
}

double gap_residual(const CouplingProblem &p, double delta, double T, double quad_tol)
{
   const auto integrand = [delta, T](double xi) { return gap_kernel(std::hypot(xi, delta), T); };
   return p.U() * numerics::integrate(integrand, Interval(0.0, p.hbar_omega_D()), quad_tol) - 1.0;
}

double delta_curve_value(const CouplingProblem &p, double tau_c, double T, const Tolerances &tol)
{
   if (!(T >= 0.0))
      throw DomainError("delta_curve_value: T must be nonnegative");
   if (T >= tau_c)
      return 0.0;

   const double delta0 = delta_at_zero(p);
   const auto f = [&](double delta) { return gap_residual(p, delta, T, tol.quad_tol); };

   const double lo = kDeltaFloor * delta0;
   if (f(lo) <= 0.0)
      return 0.0;

   // At T = 0 the root is delta0 itself; solve on a bracket around it so the
   // closed form is reproduced by the root solve, not assumed.
   if (T == 0.0)
      return numerics::find_root(f, Interval(lo, 2.0 * delta0), tol.root_tol * delta0);

   // For T > 0 the residual at delta0 is negative unless tanh has saturated to
   // within quadrature accuracy, in which case the gap equals delta0.
   if (f(delta0) >= 0.0)
      return delta0;
   return numerics::find_root(f, Interval(lo, delta0), tol.root_tol * delta0);
}

double delta_curve_derivative(const CouplingProblem &p, double tau_c, double T, const Tolerances &tol)
{
   if (!(T > 0.0 && T < tau_c))
      throw DomainError("delta_curve_derivative: T must lie in (0, tau_c), got " + std::to_string(T));

   const double delta = delta_curve_value(p, tau_c, T, tol);
   if (!(delta > 0.0))
      throw DomainError("delta_curve_derivative: gap vanished at T = " + std::to_string(T));

   const Interval range(0.0, p.hbar_omega_D());
   const double b = delta / (2.0 * T);

   // dg/dT = -U / (2T^2) int sech^2(s / 2T) dxi, scaled by sech^2(delta / 2T).
   const double sech_scaled = numerics::integrate(
       [&](double xi) { return sech2_ratio(std::hypot(xi, delta) / (2.0 * T), b); }, range,
       tol.quad_tol);
   const double g_T = -p.U() / (2.0 * T * T) * numerics::sech2(b) * sech_scaled;

   // dg/dDelta = U Delta int [sech^2(s/2T) / (2T s^2) - tanh(s/2T) / s^3] dxi.
   const double g_delta =
       p.U() * delta *
       numerics::integrate(
           [&](double xi) {
              const double s = std::hypot(xi, delta);
              const double z = s / (2.0 * T);
              return numerics::sech2(z) / (2.0 * T * s * s) - safe_tanh(z) / (s * s * s);
           },
           range, tol.quad_tol);

   return -g_T / g_delta;
}

GapCurve::GapCurve(const CouplingProblem &p, const Tolerances &tol)
    : problem_(p), tol_(tol), tau_c_(solve_tau_c(p, tol)), delta0_(delta_at_zero(p))
{
}

CurveTable::CurveTable(const GapCurve &curve, double t_max, std::size_t n_points)
{
   if (!(t_max > 0.0))
      throw PreconditionError("CurveTable: t_max must be positive");
   if (n_points < 2)
      throw PreconditionError("CurveTable: need at least two points");

   temps_.resize(n_points);
   values_.resize(n_points);
   for (std::size_t k = 0; k < n_points; ++k) {
      temps_[k] = t_max * static_cast<double>(k) / static_cast<double>(n_points - 1);
      values_[k] = curve.value(temps_[k]);
   }
   temps_.back() = t_max;

   // Fritsch-Carlson slopes: harmonic mean of neighbouring secants, zero at
   // extrema, one-sided at the ends.
   const std::size_t n = n_points;
   std::vector<double> secant(n - 1);
   for (std::size_t k = 0; k + 1 < n; ++k)
      secant[k] = (values_[k + 1] - values_[k]) / (temps_[k + 1] - temps_[k]);

   slopes_.assign(n, 0.0);
   slopes_.front() = secant.front();
   slopes_.back() = secant.back();
   for (std::size_t k = 1; k + 1 < n; ++k) {
      const double s0 = secant[k - 1];
      const double s1 = secant[k];
      if (s0 * s1 > 0.0) {
         const double h0 = temps_[k] - temps_[k - 1];
         const double h1 = temps_[k + 1] - temps_[k];
         const double w0 = 2.0 * h1 + h0;
         const double w1 = h1 + 2.0 * h0;
         slopes_[k] = (w0 + w1) / (w0 / s0 + w1 / s1);
      }
   }
}

double CurveTable::operator()(double T) const
{
   if (!(T >= temps_.front() && T <= temps_.back()))
      throw DomainError("CurveTable: T outside tabulated range");

   auto it = std::upper_bound(temps_.begin(), temps_.end(), T);
   std::size_t k = it == temps_.begin() ? 0 : static_cast<std::size_t>(it - temps_.begin()) - 1;
   if (k + 1 >= temps_.size())
      return values_.back();

   const double h = temps_[k + 1] - temps_[k];
   const double t = (T - temps_[k]) / h;
   const double t2 = t * t;
   const double t3 = t2 * t;
   return (2 * t3 - 3 * t2 + 1) * values_[k] + (t3 - 2 * t2 + t) * h * slopes_[k] +
          (-2 * t3 + 3 * t2) * values_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
}

double solve_tau0(const GapCurve &curve1, double z0, double tol)
{
   const double tau1 = curve1.tau_c();
   const auto f = [&](double tau) { return curve1.value(tau) - 2.0 * z0 * tau; };
   return numerics::find_root(f, Interval(0.0, tau1), tol * tau1);
}

double frozen_gap_integral(double delta, double tau0, double hbar_omega_D, double quad_tol)
{
   const auto integrand = [delta, tau0](double xi) {
      return gap_kernel(std::hypot(xi, delta), tau0);
   };
   return numerics::integrate(integrand, Interval(0.0, hbar_omega_D), quad_tol);
}

double eval_F(double T, double tau0, const GapCurve &curve1)
{
   return frozen_gap_integral(curve1.value(T), tau0, curve1.problem().hbar_omega_D(),
                              curve1.tolerances().quad_tol);
}

double eval_G(const GDomain &domain, double T, double X, double xi)
{
   if (!(T >= 0.0 && T <= domain.tau0))
      throw DomainError("eval_G: T outside [0, tau0]");
   if (!(X >= domain.x_min))
      throw DomainError("eval_G: X below Delta1(tau0)^2");
   if (!(xi >= 0.0 && xi <= domain.hbar_omega_D))
      throw DomainError("eval_G: xi outside [0, hbar_omega_D]");

   if (T == 0.0)
      return xi * xi;
   const double s = std::sqrt(xi * xi + X);
   return xi * xi * safe_tanh(s / (2.0 * T)) + 4.0 * X * T / s;
}

} // namespace bcsgap
