#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcsgap/errors.hpp"
#include "bcsgap/numerics.hpp"

#include <cmath>
#include <random>

using namespace bcsgap;
using numerics::Interval;

namespace {

// Dense composite trapezoid rule, the independent oracle for smooth integrands.
double trapezoid(const numerics::ScalarFunction &f, double lo, double hi, int n)
{
   const double h = (hi - lo) / n;
   double sum = 0.5 * (f(lo) + f(hi));
   for (int k = 1; k < n; ++k)
      sum += f(lo + k * h);
   return sum * h;
}

double bisect(const numerics::ScalarFunction &f, double lo, double hi, double tol)
{
   double flo = f(lo);
   while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm < 0) == (flo < 0)) {
         lo = mid;
         flo = fm;
      } else {
         hi = mid;
      }
   }
   return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("interval rejects degenerate and non-finite bounds")
{
   CHECK_THROWS_AS(Interval(1.0, 1.0), PreconditionError);
   CHECK_THROWS_AS(Interval(2.0, 1.0), PreconditionError);
   CHECK_THROWS_AS(Interval(0.0, INFINITY), PreconditionError);
   CHECK_THROWS_AS(Interval(NAN, 1.0), PreconditionError);
}

TEST_CASE("integrate: constants and polynomials")
{
   CHECK(numerics::integrate([](double) { return 1.0; }, Interval(0, 1), 1e-10) ==
         doctest::Approx(1.0).epsilon(1e-14));
   CHECK(numerics::integrate([](double x) { return x; }, Interval(0, 1), 1e-10) ==
         doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integrate: random cubics match the closed form")
{
   std::mt19937_64 rng(7);
   std::uniform_real_distribution<double> coef(-5.0, 5.0);
   for (int trial = 0; trial < 100; ++trial) {
      const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
      const auto f = [=](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); };
      const double exact = c0 + c1 / 2 + c2 / 3 + c3 / 4;
      CHECK(std::fabs(numerics::integrate(f, Interval(0, 1), 1e-10) - exact) <= 1e-10);
   }
}

TEST_CASE("integrate: regularised tanh(x/0.2)/x against a dense trapezoid oracle")
{
   const auto f = [](double x) { return x == 0.0 ? 1.0 / 0.2 : std::tanh(x / 0.2) / x; };
   const double oracle = trapezoid(f, 0.0, 1.0, 1'000'000);
   CHECK(std::fabs(numerics::integrate(f, Interval(0, 1), 1e-10) - oracle) <= 1e-8);
}

TEST_CASE("integrate: additivity over split intervals")
{
   const double tol = 1e-10;
   const auto f = [](double x) { return std::exp(-3 * x) * std::cos(5 * x) + 1.0 / (1 + x * x); };
   std::mt19937_64 rng(11);
   std::uniform_real_distribution<double> u(0.0, 1.0);
   for (int trial = 0; trial < 50; ++trial) {
      double pts[3] = {u(rng) * 3, u(rng) * 3, u(rng) * 3};
      std::sort(std::begin(pts), std::end(pts));
      if (pts[1] - pts[0] < 1e-3 || pts[2] - pts[1] < 1e-3)
         continue;
      const double whole = numerics::integrate(f, Interval(pts[0], pts[2]), tol);
      const double left = numerics::integrate(f, Interval(pts[0], pts[1]), tol);
      const double right = numerics::integrate(f, Interval(pts[1], pts[2]), tol);
      CHECK(std::fabs(whole - left - right) <= 3 * tol);
   }
}

TEST_CASE("integrate: non-convergence carries the estimate")
{
   // 1/sqrt(x) with a shifted-off singularity needs many panels at this tolerance.
   const auto f = [](double x) { return 1.0 / std::sqrt(x + 1e-14); };
   try {
      numerics::integrate(f, Interval(0, 1), 1e-15, {.max_subintervals = 5});
      FAIL("expected NonConvergenceError");
   } catch (const NonConvergenceError &e) {
      CHECK(e.estimate() > 1.0);
      CHECK(e.error_estimate() > 0.0);
   }
   CHECK_THROWS_AS(numerics::integrate(f, Interval(0, 1), 0.0), PreconditionError);
}

TEST_CASE("find_root: basic cases")
{
   CHECK(numerics::find_root([](double z) { return z - 2.0; }, Interval(0, 4), 1e-12) ==
         doctest::Approx(2.0).epsilon(1e-12));
   CHECK(numerics::find_root([](double z) { return z - 1.0; }, Interval(1, 3), 1e-12) == 1.0);
   CHECK_THROWS_AS(numerics::find_root([](double z) { return z * z + 1; }, Interval(-1, 1), 1e-12),
                   PreconditionError);
   CHECK_THROWS_AS(numerics::find_root([](double z) { return std::exp(z) - 1.5; }, Interval(0, 1), 1e-15,
                                       {.max_iterations = 3}),
                   NonConvergenceError);
}

TEST_CASE("find_root: z tanh z - 2 against plain bisection")
{
   const auto f = [](double z) { return z * std::tanh(z) - 2.0; };
   const double oracle = bisect(f, 1.0, 4.0, 1e-13);
   const double r = numerics::find_root(f, Interval(1, 4), 1e-12);
   CHECK(std::fabs(r - oracle) <= 2e-12);
   CHECK(r == doctest::Approx(2.0653).epsilon(1e-3));
}

TEST_CASE("find_root: |f(r)| is no larger than at the final bracket ends and sub-brackets agree")
{
   const auto f = [](double x) { return std::exp(x) - 3.0; };
   const double tol = 1e-10;
   const double root = numerics::find_root(f, Interval(0, 5), tol);
   CHECK(std::fabs(root - std::log(3.0)) <= tol);

   std::mt19937_64 rng(3);
   std::uniform_real_distribution<double> u(0.0, 1.0);
   for (int trial = 0; trial < 100; ++trial) {
      const double lo = std::log(3.0) - u(rng) * 1.0 - 1e-9;
      const double hi = std::log(3.0) + u(rng) * 4.0 + 1e-9;
      CHECK(std::fabs(numerics::find_root(f, Interval(lo, hi), tol) - root) <= 2 * tol);
   }
}

TEST_CASE("gauss_lobatto: endpoints, ordering, weights and exactness")
{
   for (std::size_t n : {3u, 16u, 64u, 129u}) {
      const auto rule = numerics::gauss_lobatto(n, Interval(0.0, 2.5));
      REQUIRE(rule.size() == n);
      CHECK(rule.nodes.front() == 0.0);
      CHECK(rule.nodes.back() == 2.5);
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
         CHECK(rule.weights[k] > 0.0);
         if (k > 0)
            CHECK(rule.nodes[k] > rule.nodes[k - 1]);
         sum += rule.weights[k];
      }
      CHECK(std::fabs(sum - 2.5) <= 1e-12 * 2.5);

      // x^(2n-3) is integrated exactly.
      const int p = rule.order;
      double moment = 0.0;
      for (std::size_t k = 0; k < n; ++k)
         moment += rule.weights[k] * std::pow(rule.nodes[k] / 2.5, p);
      CHECK(moment == doctest::Approx(2.5 / (p + 1)).epsilon(1e-12));
   }
   CHECK_THROWS_AS(numerics::gauss_lobatto(2, Interval(0, 1)), PreconditionError);
}

TEST_CASE("overflow-safe hyperbolics")
{
   CHECK(numerics::safe_tanh(1e6) == 1.0);
   CHECK(numerics::safe_tanh(-1e6) == -1.0);
   CHECK(numerics::safe_tanh(0.3) == doctest::Approx(std::tanh(0.3)));
   CHECK(numerics::sech2(1e6) == 0.0);
   CHECK(numerics::sech2(0.0) == 1.0);
   for (double z : {-3.0, -0.5, 0.7, 5.0})
      CHECK(numerics::sech2(z) == doctest::Approx(1.0 / (std::cosh(z) * std::cosh(z))).epsilon(1e-14));
}
