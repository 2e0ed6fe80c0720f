#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcsgap/gap_solver.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace bcsgap;

namespace {

constexpr double kU1 = 0.3;
constexpr double kU2 = 0.3002;

ModelParams separable() { return ModelParams(1.0, kU1, kU2, SeparablePotential{}); }

const GapProblem &separable_problem()
{
   static const GapProblem p(separable(), SolverConfig{});
   return p;
}

const GapProblem &constant_problem(double U)
{
   static const GapProblem p1(ModelParams(1.0, kU1, kU2, ConstantPotential{kU1}), SolverConfig{});
   static const GapProblem p2(ModelParams(1.0, kU1, kU2, ConstantPotential{kU2}), SolverConfig{});
   return U == kU1 ? p1 : p2;
}

// Random element of the band: lambda(x) Delta1 + (1 - lambda(x)) Delta2 with
// lambda piecewise linear between seeded knots.
std::vector<double> band_sample(oracle::Rng &rng, const std::vector<double> &nodes, double d1, double d2)
{
   constexpr int knots = 8;
   double lam[knots + 1];
   for (double &l : lam)
      l = rng.uniform();
   std::vector<double> u(nodes.size());
   const double span = nodes.back();
   for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double pos = nodes[j] / span * knots;
      const int k = std::min(knots - 1, static_cast<int>(pos));
      const double w = pos - k;
      const double l = (1 - w) * lam[k] + w * lam[k + 1];
      u[j] = l * d1 + (1 - l) * d2;
   }
   return u;
}

double sup_diff(const std::vector<double> &a, const std::vector<double> &b)
{
   double d = 0;
   for (std::size_t k = 0; k < a.size(); ++k)
      d = std::max(d, std::fabs(a[k] - b[k]));
   return d;
}

// Natural Nystrom extension of a slice to an arbitrary x.
double nystrom_value(const ModelParams &params, const Discretization &ctx, const std::vector<double> &u,
                     double T, double x)
{
   double acc = 0;
   for (std::size_t j = 0; j < ctx.size(); ++j) {
      const double s = std::hypot(ctx.nodes()[j], u[j]);
      acc += ctx.weights()[j] * params.potential_at(x, ctx.nodes()[j]) * u[j] / s * std::tanh(s / (2 * T));
   }
   return acc;
}

} // namespace

TEST_CASE("model validation")
{
   CHECK_THROWS_AS(ModelParams(1.0, 0.3, 0.3, SeparablePotential{}), ModelError);
   CHECK_THROWS_AS(ModelParams(1.0, 0.3, 0.4, ConstantPotential{0.5}), ModelError);
   CHECK_THROWS_AS(ModelParams(1.0, 0.3, 0.4, SeparablePotential{"cosine", 1.0}), ModelError);
   try {
      ModelParams(1.0, 0.3, 0.4, ConstantPotential{0.25});
      FAIL("expected ModelError");
   } catch (const ModelError &e) {
      CHECK(std::string(e.what()).find("U(0, 0)") != std::string::npos);
   }

   TablePotential table{{0.0, 0.5, 1.0}, {0.0, 1.0}, {{0.3, 0.3}, {0.35, 0.4}, {0.3, 0.3}}};
   const ModelParams tp(1.0, 0.3, 0.4, table);
   CHECK(tp.potential_at(0.25, 0.5) == doctest::Approx(0.5 * 0.3 + 0.5 * 0.375));
   table.x = {0.0, 0.7, 0.6};
   CHECK_THROWS_AS(ModelParams(1.0, 0.3, 0.4, table), ModelError);
   table.x = {0.1, 0.5, 1.0};
   CHECK_THROWS_AS(ModelParams(1.0, 0.3, 0.4, table), ModelError);
}

TEST_CASE("discretisation: rule, kernel table and validation")
{
   const Discretization constant(ModelParams(1.0, kU1, kU2, ConstantPotential{0.3001}), 64);
   double wsum = 0;
   for (std::size_t i = 0; i < constant.size(); ++i) {
      wsum += constant.weights()[i];
      for (std::size_t j = 0; j < constant.size(); ++j)
         CHECK(constant.kernel(i, j) == 0.3001);
   }
   CHECK(std::fabs(wsum - 1.0) <= 1e-12);

   const Discretization sep(separable(), 32);
   CHECK(sep.nodes().front() == 0.0);
   for (std::size_t j = 0; j < sep.size(); ++j) {
      CHECK(sep.kernel(0, j) == kU1);
      CHECK(sep.kernel(j, j) >= kU1);
      CHECK(sep.kernel(j, j) <= kU2);
   }
   CHECK_THROWS_AS(Discretization(separable(), 15), PreconditionError);
}

TEST_CASE("apply_A: zero input, domain, and fixed point of the constant problem")
{
   const auto &prob = constant_problem(kU1);
   const auto &ctx = prob.discretization();
   const std::vector<double> zero(ctx.size(), 0.0);
   for (double v : apply_A(ctx, zero, 0.01))
      CHECK(v == 0.0);

   std::vector<double> neg(ctx.size(), 0.05);
   neg[3] = -1e-9;
   CHECK_THROWS_AS(apply_A(ctx, neg, 0.01), DomainError);
   CHECK_THROWS_AS(apply_A(ctx, zero, -0.01), DomainError);

   for (double T : {0.0, 0.5 * prob.constants().tau, prob.constants().tau}) {
      const double d1 = prob.band().lower.value(T);
      const std::vector<double> u(ctx.size(), d1);
      for (double v : apply_A(ctx, u, T))
         CHECK(v == doctest::Approx(d1).epsilon(1e-11));
   }
}

TEST_CASE("apply_A maps the band into itself, preserves order, and obeys the U2/U1 bound")
{
   const auto &prob = separable_problem();
   const auto &ctx = prob.discretization();
   const double tol = curve_tolerance(prob.config(), prob.band());
   oracle::Rng rng{99};
   for (double T : {0.0, 0.5 * prob.constants().tau, prob.constants().tau}) {
      const double d1 = prob.band().lower.value(T);
      const double d2 = prob.band().upper.value(T);
      for (int trial = 0; trial < 50; ++trial) {
         auto u = band_sample(rng, ctx.nodes(), d1, d2);
         auto v = band_sample(rng, ctx.nodes(), d1, d2);
         const auto Au = apply_A(ctx, u, T);
         const auto Av = apply_A(ctx, v, T);
         for (double x : Au) {
            CHECK(x >= d1 - tol);
            CHECK(x <= d2 + tol);
         }
         CHECK(sup_diff(Au, Av) <= (kU2 / kU1) * sup_diff(u, v) + 1e-10);

         // Ordered pair: w = max(u, v) >= u.
         std::vector<double> w(u.size());
         for (std::size_t k = 0; k < u.size(); ++k)
            w[k] = std::max(u[k], v[k]);
         const auto Aw = apply_A(ctx, w, T);
         for (std::size_t k = 0; k < u.size(); ++k)
            CHECK(Au[k] <= Aw[k] + 1e-12);
      }
   }
}

TEST_CASE("solve_slice: constant potentials reproduce the scalar curves")
{
   for (double U : {kU1, kU2}) {
      const auto &prob = constant_problem(U);
      const auto &cfg = prob.config();
      const double T = 0.6 * prob.constants().tau;
      const auto slice = solve_slice(prob.discretization(), prob.band(), T, cfg);
      const double expected = U == kU1 ? slice.delta1 : slice.delta2;
      for (std::size_t k = 0; k < slice.nodes.size(); ++k) {
         CHECK(std::fabs(slice.upper[k] - expected) <= 10 * cfg.fp_tol);
         CHECK(std::fabs(slice.lower[k] - expected) <= 10 * cfg.fp_tol);
      }
      CHECK(slice.monotonicity_violation == 0.0);
      CHECK(slice.bracket_violation == 0.0);
   }
}

TEST_CASE("solve_slice: separable potential encloses an interior solution")
{
   const auto &prob = separable_problem();
   const auto &cfg = prob.config();
   const double T = 0.5 * prob.constants().tau;
   const auto slice = solve_slice(prob.discretization(), prob.band(), T, cfg);
   CHECK(slice.enclosure_width < 10 * cfg.fp_tol);
   CHECK(slice.enclosure_width >= 0.0);
   CHECK(slice.monotonicity_violation == 0.0);
   CHECK(slice.bracket_violation == 0.0);
   for (std::size_t k = 0; k < slice.nodes.size(); ++k) {
      CHECK(slice.lower[k] <= slice.upper[k] + 1e-15);
      CHECK(slice.lower[k] >= slice.delta1);
      CHECK(slice.upper[k] <= slice.delta2);
   }
   const auto mid = slice.midpoint();
   CHECK(mid[32] > slice.delta1 + 1e-6);
   CHECK(mid[32] < slice.delta2 - 1e-6);
   CHECK(residual_certificate(prob.discretization(), slice) <= 2 * slice.enclosure_width + 1e-8);
}

TEST_CASE("solve_slice: iteration cap reports the last enclosure")
{
   const auto &prob = separable_problem();
   SolverConfig tight = prob.config();
   tight.max_iter = 3;
   try {
      solve_slice(prob.discretization(), prob.band(), 0.5 * prob.constants().tau, tight);
      FAIL("expected SliceNonConvergenceError");
   } catch (const SliceNonConvergenceError &e) {
      CHECK(e.temperature() == 0.5 * prob.constants().tau);
      CHECK(e.last().enclosure_width > tight.fp_tol);
      CHECK(e.last().iterations.upper == 3);
   }
}

TEST_CASE("grid convergence: doubling the node count moves the slice by < 1e-6")
{
   const auto &prob = separable_problem();
   const double T = 0.5 * prob.constants().tau;
   SolverConfig fine_cfg = prob.config();
   fine_cfg.n_nodes = 128;
   const Discretization fine(prob.params(), fine_cfg.n_nodes);
   const auto coarse_slice = solve_slice(prob.discretization(), prob.band(), T, prob.config());
   const auto fine_slice = solve_slice(fine, prob.band(), T, fine_cfg);
   const auto fine_mid = fine_slice.midpoint();
   const auto coarse_mid = coarse_slice.midpoint();
   double worst = 0;
   for (std::size_t k = 0; k < coarse_mid.size(); ++k)
      worst = std::max(worst, std::fabs(coarse_mid[k] -
                                        nystrom_value(prob.params(), fine, fine_mid, T, coarse_slice.nodes[k])));
   CHECK(worst < 1e-6);
}

TEST_CASE("solve_surface: slice independence, monotone decrease and Lipschitz bound")
{
   const auto &prob = separable_problem();
   const auto surface = solve_surface(prob, prob.default_grid());
   REQUIRE(surface.slices.size() == 33);
   CHECK(surface.gamma == prob.constants().gamma);

   const auto standalone = solve_slice(prob.discretization(), prob.band(), 0.0, prob.config());
   CHECK(standalone.upper == surface.slices[0].upper);
   CHECK(standalone.lower == surface.slices[0].lower);

   const double slack = 2 * surface.max_enclosure_width();
   for (std::size_t t = 0; t + 1 < surface.slices.size(); ++t) {
      const double dT = surface.T_grid[t + 1] - surface.T_grid[t];
      for (std::size_t j = 0; j < surface.nodes().size(); ++j) {
         const double drop = surface.midpoint(t, j) - surface.midpoint(t + 1, j);
         CHECK(drop >= -slack);
         CHECK(drop <= surface.gamma * dT + slack);
      }
   }
}

TEST_CASE("solve_surface: grid validation and annotated failures")
{
   const auto &prob = separable_problem();
   CHECK_THROWS_AS(solve_surface(prob, {0.0, 1.1 * prob.constants().tau0}), DomainError);
   CHECK_THROWS_AS(solve_surface(prob, {0.0, 0.002, 0.001}), PreconditionError);
   CHECK_THROWS_AS(solve_surface(prob, {}), PreconditionError);

   SolverConfig cfg = prob.config();
   cfg.max_iter = 5;
   const GapProblem capped(prob.params(), cfg);
   try {
      solve_surface(capped, {0.0, 0.5 * prob.constants().tau});
      FAIL("expected SliceNonConvergenceError");
   } catch (const SliceNonConvergenceError &e) {
      CHECK(e.temperature() == 0.0);
      CHECK(e.completed().empty());
   }
}

TEST_CASE("evaluate: exact at grid points, matches the scalar curve for a constant potential")
{
   const auto &prob = constant_problem(kU1);
   const auto surface = solve_surface(prob, prob.default_grid());
   for (std::size_t t : {0u, 7u, 32u})
      for (std::size_t j : {0u, 10u, 63u})
         CHECK(evaluate(surface, surface.T_grid[t], surface.nodes()[j]) == surface.midpoint(t, j));

   double max_d2 = 0;
   for (const auto &row : surface.dT2)
      for (double v : row)
         max_d2 = std::max(max_d2, std::fabs(v));
   const double h = surface.T_grid[1] - surface.T_grid[0];
   const double interp_tol = h * h / 8 * max_d2 + 1e-9;
   for (double frac : {0.13, 0.51, 0.77, 0.93}) {
      const double T = frac * prob.constants().tau;
      const double expected = prob.band().lower.value(T);
      CHECK(std::fabs(evaluate(surface, T, 0.37) - expected) <= interp_tol);
      CHECK(std::fabs(evaluate(surface, T, 0.37) - evaluate(surface, T, 0.81)) <= 1e-9);
   }
   CHECK_THROWS_AS(evaluate(surface, -1e-6, 0.3), DomainError);
   CHECK_THROWS_AS(evaluate(surface, 0.001, 1.5), DomainError);
}

TEST_CASE("temperature derivatives: sign, Lipschitz range, flatness and refinement")
{
   const auto &prob = separable_problem();
   const auto surface = solve_surface(prob, prob.default_grid());
   const auto [d1, d2] = temperature_derivatives(surface);
   CHECK(d1 == surface.dT1);
   CHECK(d2 == surface.dT2);
   const double h = surface.T_grid[1] - surface.T_grid[0];
   const double eps = 10 * prob.config().fp_tol / h;
   for (const auto &row : d1)
      for (double v : row) {
         CHECK(v <= eps);
         CHECK(v >= -surface.gamma - eps);
      }

   const auto &cprob = constant_problem(kU1);
   const auto csurf = solve_surface(cprob, cprob.default_grid());
   const double flat = 1e-2 * cprob.constants().delta1_0 / cprob.constants().tau;
   for (std::size_t t = 0; t < 3; ++t)
      for (double v : csurf.dT1[t])
         CHECK(std::fabs(v) < flat);

   // Halving h: interior second derivatives agree to 25% of the curvature scale.
   SolverConfig fine_cfg = prob.config();
   fine_cfg.n_T = 65;
   const GapProblem fine_prob(prob.params(), fine_cfg);
   const auto fine = solve_surface(fine_prob, fine_prob.default_grid());
   double scale = 0, worst = 0;
   for (std::size_t t = 1; t + 1 < surface.T_grid.size(); ++t)
      for (std::size_t j = 0; j < surface.nodes().size(); ++j) {
         scale = std::max(scale, std::fabs(d2[t][j]));
         worst = std::max(worst, std::fabs(d2[t][j] - fine.dT2[2 * t][j]));
      }
   CHECK(worst < 0.25 * scale);

   GapSurface small = surface;
   small.T_grid.resize(4);
   small.slices.resize(4);
   CHECK_THROWS_AS(temperature_derivatives(small), ConfigError);
   GapSurface skewed = surface;
   skewed.T_grid[3] += 1e-6;
   CHECK_THROWS_AS(temperature_derivatives(skewed), ConfigError);
}

TEST_CASE("constants: ordering chain and gamma identity")
{
   const auto &c = separable_problem().constants();
   CHECK(0.0 < c.tau0);
   CHECK(c.tau0 < c.tau1);
   CHECK(c.tau1 < c.tau2);
   CHECK(c.tau < c.tau0);
   CHECK(c.delta1_0 < c.delta2_0);
   CHECK(c.gamma * (1 - kU2 * c.a) == doctest::Approx(kU2 * c.b).epsilon(1e-12));
   CHECK_THROWS_AS(GapProblem(ModelParams(1.0, kU1, 0.31, SeparablePotential{}), SolverConfig{}),
                   CouplingWindowError);
   SolverConfig bad;
   bad.tau_fraction = 1.0;
   CHECK_THROWS_AS(GapProblem(separable(), bad), ConfigError);
}
