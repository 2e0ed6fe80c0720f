#include "bcsgap/numerics.hpp"

#include "bcsgap/errors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <utility>

namespace bcsgap::numerics {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
   if (!std::isfinite(lo) || !std::isfinite(hi))
      throw PreconditionError("interval endpoints must be finite");
   if (!(lo < hi))
      throw PreconditionError("interval requires lo < hi, got [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights belonging to kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
   double lo;
   double hi;
   double result;
   double error;

   bool operator<(const Segment &other) const { return error < other.error; }
};

Segment kronrod15(const ScalarFunction &f, double lo, double hi)
{
   constexpr double eps = std::numeric_limits<double>::epsilon();
   const double center = 0.5 * (lo + hi);
   const double half = 0.5 * (hi - lo);

   std::array<double, 15> fv{};
   fv[7] = f(center);
   for (std::size_t k = 0; k < 7; ++k) {
      const double dx = half * kXgk[k];
      fv[k] = f(center - dx);
      fv[14 - k] = f(center + dx);
   }

   double kronrod = kWgk[7] * fv[7];
   double gauss = kWg[3] * fv[7];
   double abs_sum = std::fabs(kronrod);
   for (std::size_t k = 0; k < 7; ++k) {
      const double pair = fv[k] + fv[14 - k];
      kronrod += kWgk[k] * pair;
      abs_sum += kWgk[k] * (std::fabs(fv[k]) + std::fabs(fv[14 - k]));
      if (k % 2 == 1)
         gauss += kWg[k / 2] * pair;
   }

   const double mean = 0.5 * kronrod;
   double asc = kWgk[7] * std::fabs(fv[7] - mean);
   for (std::size_t k = 0; k < 7; ++k)
      asc += kWgk[k] * (std::fabs(fv[k] - mean) + std::fabs(fv[14 - k] - mean));

   kronrod *= half;
   gauss *= half;
   abs_sum *= std::fabs(half);
   asc *= std::fabs(half);

   double error = std::fabs(kronrod - gauss);
   if (asc != 0.0 && error != 0.0)
      error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
   if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
      error = std::max(50.0 * eps * abs_sum, error);

   return {lo, hi, kronrod, error};
}

} // namespace

double integrate(const ScalarFunction &f, const Interval &interval, double tol,
                 const IntegrationLimits &limits)
{
   if (!(tol > 0.0))
      throw PreconditionError("integrate: tol must be positive");

   std::priority_queue<Segment> active;
   Segment first = kronrod15(f, interval.lo(), interval.hi());
   double result = first.result;
   double error = first.error;
   active.push(first);

   // Segments too narrow to split keep contributing but leave the queue.
   double frozen_error = 0.0;
   std::size_t count = 1;

   while (error > tol * std::max(1.0, std::fabs(result))) {
      if (active.empty() || count >= limits.max_subintervals)
         throw NonConvergenceError("integrate: refinement limit reached (estimate " +
                                       std::to_string(result) + ", error " +
                                       std::to_string(error) + ")",
                                   result, error);

      const Segment worst = active.top();
      active.pop();
      const double mid = 0.5 * (worst.lo + worst.hi);
      if (!(mid > worst.lo && mid < worst.hi)) {
         frozen_error += worst.error;
         continue;
      }

      const Segment left = kronrod15(f, worst.lo, mid);
      const Segment right = kronrod15(f, mid, worst.hi);
      result += left.result + right.result - worst.result;
      active.push(left);
      active.push(right);
      ++count;

      // Periodic re-summation keeps the incremental error total from drifting.
      if (count % 64 == 0) {
         error = frozen_error;
         auto copy = active;
         for (; !copy.empty(); copy.pop())
            error += copy.top().error;
      } else {
         error += left.error + right.error - worst.error;
      }
   }

   // Final exact re-summation, smallest contributions first.
   std::vector<double> parts;
   parts.reserve(active.size());
   while (!active.empty()) {
      parts.push_back(active.top().result);
      active.pop();
   }
   std::sort(parts.begin(), parts.end(),
             [](double a, double b) { return std::fabs(a) < std::fabs(b); });
   double total = 0.0;
   for (double p : parts)
      total += p;
   return total;
}

double find_root(const ScalarFunction &f, const Interval &bracket, double tol,
                 const RootLimits &limits)
{
   if (!(tol > 0.0))
      throw PreconditionError("find_root: tol must be positive");

   double a = bracket.lo();
   double b = bracket.hi();
   double fa = f(a);
   double fb = f(b);
   if (fa == 0.0)
      return a;
   if (fb == 0.0)
      return b;
   if (std::signbit(fa) == std::signbit(fb))
      throw PreconditionError("find_root: bracket [" + std::to_string(a) + ", " +
                              std::to_string(b) + "] does not straddle a sign change");

   bool secant = true;
   for (int it = 0; it < limits.max_iterations; ++it) {
      const double width = b - a;
      if (width <= tol)
         return std::fabs(fa) <= std::fabs(fb) ? a : b;

      const double mid = a + 0.5 * width;
      if (!(mid > a && mid < b))
         return std::fabs(fa) <= std::fabs(fb) ? a : b;

      double x = mid;
      if (secant) {
         const double s = b - fb * (b - a) / (fb - fa);
         if (s > a && s < b)
            x = s;
      }

      const double fx = f(x);
      if (fx == 0.0)
         return x;
      if (std::signbit(fx) == std::signbit(fa)) {
         a = x;
         fa = fx;
      } else {
         b = x;
         fb = fx;
      }
      secant = (b - a) <= 0.5 * width;
   }

   const double best = std::fabs(fa) <= std::fabs(fb) ? a : b;
   throw NonConvergenceError("find_root: iteration cap reached", best, b - a);
}

QuadratureRule gauss_lobatto(std::size_t n, const Interval &interval)
{
   if (n < 3)
      throw PreconditionError("gauss_lobatto: need at least 3 nodes");

   const std::size_t degree = n - 1;
   const auto dn = static_cast<double>(n);
   const auto dd = static_cast<double>(degree);

   // (P_N(x), P_{N-1}(x)) by the three-term recurrence.
   auto legendre = [degree](double xk) {
      double p_prev = 1.0;
      double p_cur = xk;
      for (std::size_t j = 2; j <= degree; ++j) {
         const auto dj = static_cast<double>(j);
         const double p_next = ((2.0 * dj - 1.0) * xk * p_cur - (dj - 1.0) * p_prev) / dj;
         p_prev = p_cur;
         p_cur = p_next;
      }
      return std::pair{p_cur, p_prev};
   };

   std::vector<double> x(n), w(n);
   for (std::size_t k = 0; k < n; ++k) {
      // Chebyshev-Gauss-Lobatto starting guess, then Newton on x P_N - P_{N-1}.
      double xk = std::cos(std::numbers::pi * static_cast<double>(k) / dd);
      for (int iter = 0; iter < 100; ++iter) {
         const auto [p_n, p_nm1] = legendre(xk);
         const double step = (xk * p_n - p_nm1) / (dn * p_n);
         xk -= step;
         if (std::fabs(step) <= 1e-16)
            break;
      }
      const double p_n = legendre(xk).first;
      x[k] = xk;
      w[k] = 2.0 / (dd * dn * p_n * p_n);
   }

   // Newton ran from cos(pi k / N), i.e. descending order; map and reverse.
   const double half = 0.5 * interval.width();
   QuadratureRule rule;
   rule.order = static_cast<int>(2 * n - 3);
   rule.nodes.resize(n);
   rule.weights.resize(n);
   for (std::size_t k = 0; k < n; ++k) {
      const std::size_t r = n - 1 - k;
      rule.nodes[k] = interval.lo() + half * (1.0 + x[r]);
      rule.weights[k] = half * w[r];
   }
   rule.nodes.front() = interval.lo();
   rule.nodes.back() = interval.hi();
   return rule;
}

} // namespace bcsgap::numerics
