#include "bcsgap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace bcsgap {

namespace {

// check id -> statement it certifies.
const std::map<std::string, std::string> &anchor_table()
{
   static const std::map<std::string, std::string> table = {
       {"constant_equivalence_U1", "Eq. (1.3)"},
       {"constant_equivalence_U2", "Eq. (1.4)"},
       {"coupling_window", "Eq. (2.2)"},
       {"enclosure_certificate", "Thm 1.5"},
       {"iteration_invariants", "Lemma 2.4"},
       {"lemma13_curve_order", "Lemma 1.3"},
       {"lemma13_tau_order", "Lemma 1.3"},
       {"lemma21_F_bound", "Lemma 2.1"},
       {"lemma22_G_monotone", "Lemma 2.2"},
       {"lemma24_band_preservation", "Lemma 2.4"},
       {"lemma25_order_preservation", "Lemma 2.5"},
       {"lemma210_operator_bound", "Lemma 2.10"},
       {"prop11_closed_form", "Prop 1.1"},
       {"prop11_derivative", "Prop 1.1"},
       {"prop11_monotone", "Prop 1.1"},
       {"tau0_definition", "Eq. (1.6)"},
       {"thm110_derivatives", "Thm 1.10"},
       {"thm110_monotone_lipschitz", "Thm 1.10"},
       {"thm15_bracketing", "Thm 1.5"},
       {"z0_definition", "Eq. (1.6)"},
   };
   return table;
}

const std::string &anchor(const std::string &id) { return anchor_table().at(id); }

// Per-step rounding allowance of the fixed-point iteration, relative to Delta2.
constexpr double kRounding = 1e3 * std::numeric_limits<double>::epsilon();

// Tracks the largest violation and where it happened.
struct Worst {
   double value = 0.0;
   std::optional<CheckLocation> where;

   void update(double v, double T, double x)
   {
      if (v > value) {
         value = v;
         where = CheckLocation{T, x};
      }
   }
   void update(double v)
   {
      if (v > value)
         value = v;
   }
};

double sup_diff(const std::vector<double> &a, const std::vector<double> &b)
{
   double d = 0.0;
   for (std::size_t k = 0; k < a.size(); ++k)
      d = std::max(d, std::fabs(a[k] - b[k]));
   return d;
}

CheckResult not_evaluated(const std::string &id, CheckStatus status, std::string note)
{
   CheckResult r;
   r.check_id = id;
   r.paper_anchor = anchor(id);
   r.passed = false;
   r.status = status;
   r.note = std::move(note);
   return r;
}

CheckResult guarded(const std::string &id, const std::function<CheckResult()> &check)
{
   try {
      return check();
   } catch (const std::exception &e) {
      return not_evaluated(id, CheckStatus::Errored, e.what());
   }
}

// Everything the individual checks share.
struct Suite {
   const GapProblem &problem;
   const GapSurface *surface; // null when the surface solve failed

   const SolverConfig &cfg() const { return problem.config(); }
   const CriticalConstants &constants() const { return problem.constants(); }
   const GapCurve &curve1() const { return problem.band().lower; }
   const GapCurve &curve2() const { return problem.band().upper; }
   double curve_tol() const { return curve_tolerance(cfg(), problem.band()); }
};

// Error of the node rule on the scalar gap equations: sup over both couplings
// of |A_rule(Delta_i) - Delta_i| for the constant inputs Delta_i(T).
double rule_consistency(const Suite &s, double T)
{
   const auto &ctx = s.problem.discretization();
   double worst = 0.0;
   for (const GapCurve *c : {&s.curve1(), &s.curve2()}) {
      const double d = c->value(T);
      double sum = 0.0;
      for (std::size_t j = 0; j < ctx.size(); ++j) {
         const double E = std::hypot(ctx.nodes()[j], d);
         sum += ctx.weights()[j] * (T == 0.0 ? 1.0 / E : numerics::safe_tanh(E / (2.0 * T)) / E);
      }
      worst = std::max(worst, d * std::fabs(c->problem().U() * sum - 1.0));
   }
   return worst;
}

CheckResult check_z0(const Suite &s)
{
   const double z0 = s.constants().z0;
   const double outside = std::max({0.0, 2.06 - z0, z0 - 2.08});
   const double residual = std::fabs(2.0 / z0 - std::tanh(z0));
   return make_check("z0_definition", anchor("z0_definition"), std::max(outside, residual), 1e-12);
}

CheckResult check_tau0(const Suite &s)
{
   const auto &c = s.constants();
   Worst w;
   // Strict ordering: any non-positive gap counts as a violation.
   w.update(c.tau0 > 0.0 ? 0.0 : std::fabs(c.tau0) + std::numeric_limits<double>::min());
   w.update(c.tau0 < c.tau1 ? 0.0 : c.tau0 - c.tau1 + std::numeric_limits<double>::min());
   const double residual = std::fabs(s.curve1().value(c.tau0) - 2.0 * c.z0 * c.tau0);
   w.update(std::max(0.0, residual - s.curve_tol()));
   return make_check("tau0_definition", anchor("tau0_definition"), w.value, 0.0);
}

CheckResult check_closed_form(const Suite &s)
{
   Worst w;
   for (const GapCurve *c : {&s.curve1(), &s.curve2()}) {
      const double closed = c->problem().hbar_omega_D() / std::sinh(1.0 / c->problem().U());
      w.update(std::fabs(c->value(0.0) - closed) / closed, 0.0, 0.0);
   }
   return make_check("prop11_closed_form", anchor("prop11_closed_form"), w.value, 1e-9, w.where);
}

CheckResult check_curve_monotone(const Suite &s)
{
   // Below ~0.1 tau_c the curve is flat to double precision, so strict decrease
   // is only resolvable above that.
   Worst w;
   for (const GapCurve *c : {&s.curve1(), &s.curve2()}) {
      const double tc = c->tau_c();
      double prev = c->value(0.1 * tc);
      for (int k = 1; k <= 60; ++k) {
         const double T = tc * (0.1 + 0.9 * k / 60.0);
         const double v = c->value(T);
         w.update(v < prev || (k == 60 && v == 0.0) ? 0.0 : v - prev + std::numeric_limits<double>::min(),
                  T, 0.0);
         prev = v;
      }
      w.update(c->value(tc), tc, 0.0);
      w.update(c->value(1.2 * tc), 1.2 * tc, 0.0);
   }
   return make_check("prop11_monotone", anchor("prop11_monotone"), w.value, 0.0, w.where);
}

CheckResult check_derivative(const Suite &s)
{
   const GapCurve &c = s.curve1();
   const double tc = c.tau_c();
   const double scale = c.delta0() / tc;
   const auto fd = [&](double T) {
      const double h = 1e-6 * tc;
      return (c.value(T + h) - c.value(T - h)) / (2.0 * h);
   };

   Worst w;
   w.update(std::max(0.0, std::fabs(fd(0.05 * tc)) - 1e-3 * scale), 0.05 * tc, 0.0);
   w.update(std::max(0.0, fd(0.999 * tc) + 10.0 * scale), 0.999 * tc, 0.0);
   for (int k = 1; k < 20; ++k) {
      const double T = tc * k / 20.0;
      w.update(std::max(0.0, c.derivative(T)), T, 0.0);
   }
   return make_check("prop11_derivative", anchor("prop11_derivative"), w.value, 0.0, w.where);
}

CheckResult check_tau_order(const Suite &s)
{
   const auto &c = s.constants();
   const double tol = 10.0 * s.cfg().root_tol * c.tau2;
   const double v = c.tau2 - c.tau1 > tol ? 0.0 : tol - (c.tau2 - c.tau1);
   return make_check("lemma13_tau_order", anchor("lemma13_tau_order"), v, 0.0);
}

CheckResult check_curve_order(const Suite &s)
{
   const double tau2 = s.constants().tau2;
   const double tol = s.curve_tol();
   Worst w;
   for (int k = 0; k < 100; ++k) {
      const double T = tau2 * k / 100.0;
      const double margin = s.curve2().value(T) - s.curve1().value(T);
      w.update(margin > tol ? 0.0 : tol - margin, T, 0.0);
   }
   w.update(s.curve1().value(tau2) + s.curve2().value(tau2), tau2, 0.0);
   return make_check("lemma13_curve_order", anchor("lemma13_curve_order"), w.value, 0.0, w.where);
}

CheckResult check_F(const Suite &s)
{
   const auto &c = s.constants();
   const double hbar = s.problem.params().hbar_omega_D();
   const double U1 = s.problem.params().U1();
   const double d_tau = s.curve1().value(c.tau);
   const double modulus = std::atan(hbar / d_tau) / (2.0 * c.tau0 * d_tau);

   constexpr int n = 50;
   std::vector<double> temps(n), gaps(n), F(n);
   for (int k = 0; k < n; ++k) {
      temps[k] = c.tau * k / (n - 1);
      gaps[k] = s.curve1().value(temps[k]);
      F[k] = frozen_gap_integral(gaps[k], c.tau0, hbar, s.cfg().quad_tol);
   }

   Worst w;
   for (int k = 0; k < n; ++k) {
      w.update(std::max(0.0, U1 * F[k] - 1.0), temps[k], 0.0);
      if (k == 0)
         continue;
      const double bound = std::fabs(gaps[k] * gaps[k] - gaps[k - 1] * gaps[k - 1]) * modulus;
      w.update(std::max(0.0, std::fabs(F[k] - F[k - 1]) - bound), temps[k], 0.0);
      w.update(std::max(0.0, F[k - 1] - F[k]), temps[k], 0.0);
   }
   w.update(std::max(0.0, U1 * c.a - 1.0));
   const double slack = 10.0 * s.cfg().quad_tol * F.back();
   return make_check("lemma21_F_bound", anchor("lemma21_F_bound"), w.value, slack, w.where);
}

CheckResult check_G(const Suite &s)
{
   const auto &c = s.constants();
   const double hbar = s.problem.params().hbar_omega_D();
   const double d = s.curve1().value(c.tau0);
   const GDomain dom{c.tau0, d * d, hbar};
   SeededUniform rng(s.cfg().seed ^ 0x6a09e667f3bcc908ull);

   Worst w;
   for (int k = 0; k < 200; ++k) {
      const double X = dom.x_min + rng() * (hbar * hbar - dom.x_min);
      const double xi = rng() * hbar;
      double t1 = rng() * c.tau0;
      double t2 = rng() * c.tau0;
      if (t1 > t2)
         std::swap(t1, t2);
      w.update(std::max(0.0, eval_G(dom, t1, X, xi) - eval_G(dom, t2, X, xi)), t1, xi);
      w.update(std::max(0.0, eval_G(dom, t2, X, xi) - eval_G(dom, c.tau0, X, xi)), t2, xi);
   }
   return make_check("lemma22_G_monotone", anchor("lemma22_G_monotone"), w.value, 1e-12, w.where);
}

CheckResult check_window(const CouplingWindowReport &r)
{
   const double v = r.satisfied ? 0.0 : std::max(std::numeric_limits<double>::min(), r.U2a - 1.0);
   auto out = make_check("coupling_window", anchor("coupling_window"), v, 0.0);
   if (!r.satisfied)
      out.note = "U2 * a = " + std::to_string(r.U2a) + "; largest admissible U2 is " + std::to_string(r.max_U2);
   return out;
}

std::vector<double> check_temperatures(const Suite &s)
{
   const double tau = s.constants().tau;
   return {0.0, 0.5 * tau, tau};
}

CheckResult check_band_preservation(const Suite &s)
{
   const auto &ctx = s.problem.discretization();
   SeededUniform rng(s.cfg().seed ^ 0xbb67ae8584caa73bull);
   Worst w;
   double tol = 0.0;
   for (double T : check_temperatures(s)) {
      tol = std::max(tol, s.curve_tol() + rule_consistency(s, T));
      const double d1 = s.curve1().value(T);
      const double d2 = s.curve2().value(T);
      for (int trial = 0; trial < 50; ++trial) {
         const auto Au = ctx.apply(band_sample(rng, ctx.nodes(), d1, d2), T);
         for (std::size_t i = 0; i < Au.size(); ++i)
            w.update(std::max({0.0, d1 - Au[i], Au[i] - d2}), T, ctx.nodes()[i]);
      }
   }
   return make_check("lemma24_band_preservation", anchor("lemma24_band_preservation"), w.value, tol, w.where);
}

CheckResult check_order_preservation(const Suite &s)
{
   const auto &ctx = s.problem.discretization();
   SeededUniform rng(s.cfg().seed ^ 0x3c6ef372fe94f82bull);
   Worst w;
   for (double T : check_temperatures(s)) {
      const double d1 = s.curve1().value(T);
      const double d2 = s.curve2().value(T);
      for (int trial = 0; trial < 50; ++trial) {
         auto u = band_sample(rng, ctx.nodes(), d1, d2);
         auto v = band_sample(rng, ctx.nodes(), d1, d2);
         for (std::size_t k = 0; k < u.size(); ++k)
            if (u[k] > v[k])
               std::swap(u[k], v[k]);
         const auto Au = ctx.apply(u, T);
         const auto Av = ctx.apply(v, T);
         for (std::size_t i = 0; i < Au.size(); ++i)
            w.update(std::max(0.0, Au[i] - Av[i]), T, ctx.nodes()[i]);
      }
   }
   return make_check("lemma25_order_preservation", anchor("lemma25_order_preservation"), w.value, 1e-12,
                     w.where);
}

CheckResult check_iteration_invariants(const Suite &s)
{
   // bracket_violation already allows curve_tol; the rule error and the
   // solver's rounding allowance remain.
   Worst w;
   double slack = 0.0;
   for (const auto &slice : s.surface->slices) {
      w.update(std::max(slice.monotonicity_violation, slice.bracket_violation), slice.T, 0.0);
      slack = std::max(slack, rule_consistency(s, slice.T) + kRounding * slice.delta2);
   }
   return make_check("iteration_invariants", anchor("iteration_invariants"), w.value, slack, w.where);
}

CheckResult check_enclosure(const Suite &s)
{
   Worst w;
   for (const auto &slice : s.surface->slices) {
      const double residual = residual_certificate(s.problem.discretization(), slice);
      w.update(std::max(slice.enclosure_width, residual - 2.0 * slice.enclosure_width), slice.T, 0.0);
   }
   return make_check("enclosure_certificate", anchor("enclosure_certificate"), w.value, 1e-8, w.where);
}

CheckResult check_derivative_tables(const Suite &s)
{
   const auto &surf = *s.surface;
   if (surf.dT1.empty())
      return not_evaluated("thm110_derivatives", CheckStatus::Skipped, "derivative tables unavailable");
   const double h = surf.T_grid[1] - surf.T_grid[0];
   const double eps = 10.0 * s.cfg().fp_tol / h;
   Worst w;
   for (std::size_t t = 0; t < surf.dT1.size(); ++t)
      for (std::size_t j = 0; j < surf.dT1[t].size(); ++j) {
         const double d = surf.dT1[t][j];
         w.update(std::max({0.0, d, -surf.gamma - d}), surf.T_grid[t], surf.nodes()[j]);
      }
   return make_check("thm110_derivatives", anchor("thm110_derivatives"), w.value, eps, w.where);
}

CheckResult check_constant_equivalence_as(const std::string &id, const ModelParams &params, double U,
                                          const SolverConfig &cfg)
{
   auto r = check_constant_equivalence(params.with_potential(ConstantPotential{U}), cfg);
   r.check_id = id;
   r.paper_anchor = anchor(id);
   return r;
}

} // namespace

CheckResult make_check(std::string id, std::string anchor_text, double worst, double slack,
                       std::optional<CheckLocation> location)
{
   CheckResult r;
   r.check_id = std::move(id);
   r.paper_anchor = std::move(anchor_text);
   r.worst_violation = std::max(0.0, worst);
   r.slack = slack;
   r.passed = r.worst_violation <= slack;
   r.location = location;
   return r;
}

std::vector<double> band_sample(SeededUniform &rng, const std::vector<double> &nodes, double d1, double d2,
                                int knots)
{
   std::vector<double> lam(static_cast<std::size_t>(knots) + 1);
   for (double &l : lam)
      l = rng();
   const double lo = nodes.front();
   const double span = nodes.back() - lo;
   std::vector<double> u(nodes.size());
   for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double pos = (nodes[j] - lo) / span * knots;
      const int k = std::min(knots - 1, static_cast<int>(pos));
      const double w = pos - k;
      const double l = (1.0 - w) * lam[static_cast<std::size_t>(k)] + w * lam[static_cast<std::size_t>(k) + 1];
      u[j] = std::clamp(l * d1 + (1.0 - l) * d2, d1, d2);
   }
   return u;
}

CheckResult check_bracketing(const GapSurface &surface, double curve_tol)
{
   Worst w;
   for (std::size_t t = 0; t < surface.slices.size(); ++t) {
      const auto &slice = surface.slices[t];
      for (std::size_t j = 0; j < slice.nodes.size(); ++j) {
         const double u = surface.midpoint(t, j);
         w.update(std::max({0.0, slice.delta1 - u, u - slice.delta2}), slice.T, slice.nodes[j]);
      }
   }
   return make_check("thm15_bracketing", anchor("thm15_bracketing"), w.value,
                     surface.max_enclosure_width() + curve_tol, w.where);
}

CheckResult check_monotone_lipschitz(const GapSurface &surface)
{
   Worst w;
   for (std::size_t t = 0; t + 1 < surface.slices.size(); ++t) {
      const double dT = surface.T_grid[t + 1] - surface.T_grid[t];
      for (std::size_t j = 0; j < surface.nodes().size(); ++j) {
         const double drop = surface.midpoint(t, j) - surface.midpoint(t + 1, j);
         w.update(std::max({0.0, -drop, drop - surface.gamma * dT}), surface.T_grid[t], surface.nodes()[j]);
      }
   }
   return make_check("thm110_monotone_lipschitz", anchor("thm110_monotone_lipschitz"), w.value,
                     2.0 * surface.max_enclosure_width(), w.where);
}

CheckResult check_constant_equivalence(const ModelParams &params, const SolverConfig &cfg)
{
   const auto *c = std::get_if<ConstantPotential>(&params.potential());
   if (c == nullptr)
      throw PreconditionError("check_constant_equivalence: requires a constant potential");

   const GapProblem problem(params, cfg);
   const auto surface = solve_surface(problem, problem.default_grid());
   const GapCurve curve(CouplingProblem(params.hbar_omega_D(), c->value), tolerances_of(cfg));

   Worst w;
   for (std::size_t t = 0; t < surface.slices.size(); ++t) {
      const double expected = curve.value(surface.T_grid[t]);
      for (std::size_t j = 0; j < surface.nodes().size(); ++j)
         w.update(std::fabs(surface.midpoint(t, j) - expected), surface.T_grid[t], surface.nodes()[j]);
   }
   return make_check("constant_equivalence", "Eq. (1.3)", w.value, 10.0 * (cfg.fp_tol + cfg.root_tol),
                     w.where);
}

CheckResult check_operator_bound(const GapProblem &problem, double T, int trials, std::uint64_t seed)
{
   if (trials < 1)
      throw PreconditionError("check_operator_bound: trials must be positive");
   const auto &ctx = problem.discretization();
   const double ratio = problem.params().U2() / problem.params().U1();
   const double d1 = problem.band().lower.value(T);
   const double d2 = problem.band().upper.value(T);
   SeededUniform rng(seed);

   Worst w;
   for (int trial = 0; trial < trials; ++trial) {
      const auto u = band_sample(rng, ctx.nodes(), d1, d2);
      const auto v = band_sample(rng, ctx.nodes(), d1, d2);
      const double lhs = sup_diff(ctx.apply(u, T), ctx.apply(v, T));
      w.update(std::max(0.0, lhs - ratio * sup_diff(u, v)), T, 0.0);
   }
   return make_check("lemma210_operator_bound", anchor("lemma210_operator_bound"), w.value, 1e-10, w.where);
}

const std::vector<std::string> &registered_checks()
{
   static const std::vector<std::string> ids = [] {
      std::vector<std::string> out;
      for (const auto &[id, text] : anchor_table())
         out.push_back(id);
      return out;
   }();
   return ids;
}

std::vector<CheckResult> run_all(const ModelParams &params, const SolverConfig &cfg)
{
   std::vector<CheckResult> results;
   const auto finish = [&results] {
      std::sort(results.begin(), results.end(),
                [](const CheckResult &a, const CheckResult &b) { return a.check_id < b.check_id; });
      return results;
   };

   std::optional<GapProblem> problem;
   try {
      problem.emplace(params, cfg);
   } catch (const CouplingWindowError &e) {
      results.push_back(check_window(e.report()));
      for (const auto &id : registered_checks())
         if (id != "coupling_window")
            results.push_back(not_evaluated(id, CheckStatus::Skipped, "skipped: coupling window violated"));
      return finish();
   }

   const auto &c = problem->constants();
   results.push_back(check_window(check_coupling_window(params.U2(), c.a)));

   std::optional<GapSurface> surface;
   std::string surface_error;
   try {
      surface = solve_surface(*problem, problem->default_grid());
   } catch (const std::exception &e) {
      surface_error = e.what();
   }
   const Suite suite{*problem, surface ? &*surface : nullptr};

   const auto add = [&](const std::string &id, const std::function<CheckResult()> &fn) {
      results.push_back(guarded(id, fn));
   };
   const auto add_surface = [&](const std::string &id, const std::function<CheckResult()> &fn) {
      if (!surface)
         results.push_back(not_evaluated(id, CheckStatus::Errored, "surface solve failed: " + surface_error));
      else
         add(id, fn);
   };

   add("z0_definition", [&] { return check_z0(suite); });
   add("tau0_definition", [&] { return check_tau0(suite); });
   add("prop11_closed_form", [&] { return check_closed_form(suite); });
   add("prop11_monotone", [&] { return check_curve_monotone(suite); });
   add("prop11_derivative", [&] { return check_derivative(suite); });
   add("lemma13_tau_order", [&] { return check_tau_order(suite); });
   add("lemma13_curve_order", [&] { return check_curve_order(suite); });
   add("lemma21_F_bound", [&] { return check_F(suite); });
   add("lemma22_G_monotone", [&] { return check_G(suite); });
   add("lemma24_band_preservation", [&] { return check_band_preservation(suite); });
   add("lemma25_order_preservation", [&] { return check_order_preservation(suite); });
   add("lemma210_operator_bound",
       [&] { return check_operator_bound(*problem, 0.5 * c.tau, 50, cfg.seed ^ 0xa54ff53a5f1d36f1ull); });
   add("constant_equivalence_U1",
       [&] { return check_constant_equivalence_as("constant_equivalence_U1", params, params.U1(), cfg); });
   add("constant_equivalence_U2",
       [&] { return check_constant_equivalence_as("constant_equivalence_U2", params, params.U2(), cfg); });
   add_surface("thm15_bracketing", [&] { return check_bracketing(*surface, suite.curve_tol()); });
   add_surface("thm110_monotone_lipschitz", [&] { return check_monotone_lipschitz(*surface); });
   add_surface("thm110_derivatives", [&] { return check_derivative_tables(suite); });
   add_surface("enclosure_certificate", [&] { return check_enclosure(suite); });
   add_surface("iteration_invariants", [&] { return check_iteration_invariants(suite); });

   return finish();
}

bool all_passed(const std::vector<CheckResult> &results)
{
   return std::all_of(results.begin(), results.end(), [](const CheckResult &r) { return r.passed; });
}

} // namespace bcsgap
