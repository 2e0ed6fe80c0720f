#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace bcsgap::numerics {

// Closed interval [lo, hi] with finite lo < hi.
class Interval {
public:
   Interval(double lo, double hi);

   double lo() const noexcept { return lo_; }
   double hi() const noexcept { return hi_; }
   double width() const noexcept { return hi_ - lo_; }
   double midpoint() const noexcept { return 0.5 * (lo_ + hi_); }

private:
   double lo_;
   double hi_;
};

using ScalarFunction = std::function<double(double)>;

struct QuadratureRule {
   std::vector<double> nodes;   // strictly increasing
   std::vector<double> weights; // positive
   int order = 0;               // polynomial degree integrated exactly

   std::size_t size() const noexcept { return nodes.size(); }
};

struct IntegrationLimits {
   std::size_t max_subintervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. The interval with the
/// largest error estimate is bisected until the summed estimate drops below
/// tol * max(1, |I|).
///
/// Throws NonConvergenceError (carrying the best estimate and its error) if the
/// subinterval limit is reached first.
double integrate(const ScalarFunction &f, const Interval &interval, double tol,
                 const IntegrationLimits &limits = {});

struct RootLimits {
   int max_iterations = 400;
};

/// Bracketing root finder: bisection with secant steps whenever the previous
/// step shrank the bracket by at least half. The bracket is always kept valid.
/// Returns the end of the final bracket (width <= tol) with the smaller |f|.
///
/// Throws PreconditionError if f(lo) and f(hi) share a strict sign, and
/// NonConvergenceError when the iteration cap is hit.
double find_root(const ScalarFunction &f, const Interval &bracket, double tol,
                 const RootLimits &limits = {});

/// n-point Gauss-Lobatto rule mapped to [lo, hi]; includes both endpoints and
/// is exact for polynomials of degree 2n - 3. Requires n >= 3.
QuadratureRule gauss_lobatto(std::size_t n, const Interval &interval);

// tanh saturated to +-1 for |z| > 40.
inline double safe_tanh(double z) noexcept
{
   if (z > 40.0)
      return 1.0;
   if (z < -40.0)
      return -1.0;
   return std::tanh(z);
}

// 1/cosh^2(z) written with exp(-2|z|) so it underflows to 0 instead of
// overflowing for large |z|.
inline double sech2(double z) noexcept
{
   const double e = std::exp(-2.0 * std::fabs(z));
   return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

} // namespace bcsgap::numerics
