#include "bcsgap/gap_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bcsgap {

namespace {

// Rounding allowance for the inline monotonicity assertions, relative to the
// largest value in play.
constexpr double kRoundingSlack = 1e3 * std::numeric_limits<double>::epsilon();

double sup_distance(std::span<const double> a, std::span<const double> b)
{
   double d = 0.0;
   for (std::size_t k = 0; k < a.size(); ++k)
      d = std::max(d, std::fabs(a[k] - b[k]));
   return d;
}

std::string slice_failure_message(double T, int max_iter, double width)
{
   std::ostringstream out;
   out.precision(17);
   out << "slice at T = " << T << " did not converge within " << max_iter
       << " iterations (enclosure width " << width << ")";
   return out.str();
}

} // namespace

BandCurves make_band_curves(const ModelParams &params, const Tolerances &tol)
{
   return BandCurves{GapCurve(CouplingProblem(params.hbar_omega_D(), params.U1()), tol),
                     GapCurve(CouplingProblem(params.hbar_omega_D(), params.U2()), tol)};
}

double curve_tolerance(const SolverConfig &cfg, const BandCurves &band)
{
   return 10.0 * (cfg.quad_tol + cfg.root_tol) * band.upper.delta0();
}

CriticalConstants compute_constants(const ModelParams &params, const BandCurves &band,
                                    const SolverConfig &cfg)
{
   CriticalConstants c;
   c.z0 = solve_z0(cfg.root_tol);
   c.tau1 = band.lower.tau_c();
   c.tau2 = band.upper.tau_c();
   c.delta1_0 = band.lower.value(0.0);
   c.delta2_0 = band.upper.value(0.0);
   c.tau0 = solve_tau0(band.lower, c.z0, cfg.root_tol);
   c.tau = cfg.tau_fraction * c.tau0;
   c.tc_lower = c.tau1;
   c.tc_upper = c.tau2;

   const auto bounds = compute_bounds(band.lower, c.tau0, c.tau, params.U2());
   c.a = bounds.a;
   c.b = bounds.b;
   c.gamma = bounds.gamma;
   return c;
}

Discretization::Discretization(const ModelParams &params, int n_nodes)
    : hbar_omega_D_(params.hbar_omega_D())
{
   if (n_nodes < 16)
      throw PreconditionError("build_discretization: n_nodes must be at least 16");

   rule_ = numerics::gauss_lobatto(static_cast<std::size_t>(n_nodes),
                                   numerics::Interval(0.0, params.hbar_omega_D()));
   const std::size_t n = rule_.size();
   kernel_.resize(n * n);
   weighted_.resize(n * n);
   for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
         const double u = params.potential_at(rule_.nodes[i], rule_.nodes[j]);
         if (!(u >= params.U1() && u <= params.U2())) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "potential U(" << rule_.nodes[i] << ", " << rule_.nodes[j] << ") = " << u
                << " outside [U1, U2]";
            throw ModelError(msg.str());
         }
         kernel_[i * n + j] = u;
         weighted_[i * n + j] = u * rule_.weights[j];
      }
   }
}

std::vector<double> Discretization::apply(std::span<const double> u, double T) const
{
   const std::size_t n = size();
   if (u.size() != n)
      throw PreconditionError("apply_A: input has wrong length");
   if (!(T >= 0.0))
      throw DomainError("apply_A: T must be nonnegative");

   std::vector<double> phi(n);
   for (std::size_t j = 0; j < n; ++j) {
      if (!(u[j] >= 0.0))
         throw DomainError("apply_A: input must be nonnegative");
      if (u[j] == 0.0)
         continue;
      const double s = std::hypot(rule_.nodes[j], u[j]);
      const double t = T == 0.0 ? 1.0 : numerics::safe_tanh(s / (2.0 * T));
      phi[j] = u[j] / s * t;
   }

   std::vector<double> out(n, 0.0);
   for (std::size_t i = 0; i < n; ++i) {
      const double *row = &weighted_[i * n];
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j)
         acc += row[j] * phi[j];
      out[i] = acc;
   }
   return out;
}

std::vector<double> GapSlice::midpoint() const
{
   std::vector<double> mid(upper.size());
   for (std::size_t k = 0; k < mid.size(); ++k)
      mid[k] = 0.5 * (upper[k] + lower[k]);
   return mid;
}

SliceNonConvergenceError::SliceNonConvergenceError(double T, GapSlice last, std::vector<GapSlice> completed)
    : NonConvergenceError(slice_failure_message(T, last.iterations.upper + last.iterations.lower,
                                                last.enclosure_width),
                          last.upper.empty() ? 0.0 : last.upper.front(), last.enclosure_width),
      T_(T), last_(std::move(last)), completed_(std::move(completed))
{
}

GapSlice solve_slice(const Discretization &ctx, const BandCurves &band, double T, const SolverConfig &cfg)
{
   if (!(T >= 0.0))
      throw DomainError("solve_slice: T must be nonnegative");

   GapSlice slice;
   slice.T = T;
   slice.nodes = ctx.nodes();
   slice.delta1 = band.lower.value(T);
   slice.delta2 = band.upper.value(T);
   if (!(slice.delta1 > 0.0))
      throw DomainError("solve_slice: Delta1(T) vanishes; T must stay below tau1");

   const std::size_t n = ctx.size();
   const double band_tol = curve_tolerance(cfg, band);
   const double slack = kRoundingSlack * slice.delta2;

   const auto track_bracket = [&](const std::vector<double> &u) {
      for (double v : u)
         slice.bracket_violation = std::max(
             {slice.bracket_violation, slice.delta1 - band_tol - v, v - slice.delta2 - band_tol});
   };

   // direction = -1: upper (nonincreasing), +1: lower (nondecreasing).
   const auto run = [&](std::vector<double> &u, int direction, int &iterations) {
      for (iterations = 0; iterations < cfg.max_iter;) {
         std::vector<double> next = ctx.apply(u, T);
         ++iterations;
         track_bracket(next);
         for (std::size_t k = 0; k < n; ++k) {
            const double breach = direction < 0 ? next[k] - u[k] : u[k] - next[k];
            if (breach > slack)
               slice.monotonicity_violation = std::max(slice.monotonicity_violation, breach);
         }
         const double change = sup_distance(next, u);
         u = std::move(next);
         if (change < cfg.fp_tol)
            return true;
      }
      return false;
   };

   slice.upper.assign(n, slice.delta2);
   slice.lower.assign(n, slice.delta1);
   const bool upper_ok = run(slice.upper, -1, slice.iterations.upper);
   const bool lower_ok = run(slice.lower, +1, slice.iterations.lower);

   slice.enclosure_width = 0.0;
   for (std::size_t k = 0; k < n; ++k)
      slice.enclosure_width = std::max(slice.enclosure_width, slice.upper[k] - slice.lower[k]);

   if (!upper_ok || !lower_ok)
      throw SliceNonConvergenceError(T, std::move(slice));
   return slice;
}

double residual_certificate(const Discretization &ctx, const GapSlice &slice)
{
   const auto mid = slice.midpoint();
   return sup_distance(mid, ctx.apply(mid, slice.T));
}

double GapSurface::max_enclosure_width() const
{
   double w = 0.0;
   for (const auto &s : slices)
      w = std::max(w, s.enclosure_width);
   return w;
}

std::vector<double> uniform_grid(double tau, int n)
{
   if (n < 2)
      throw PreconditionError("uniform_grid: need at least two points");
   std::vector<double> grid(static_cast<std::size_t>(n));
   for (int k = 0; k < n; ++k)
      grid[static_cast<std::size_t>(k)] = tau * k / (n - 1);
   grid.back() = tau;
   return grid;
}

namespace {

SolverConfig validated(SolverConfig cfg)
{
   cfg.validate();
   return cfg;
}

bool is_uniform(const std::vector<double> &grid)
{
   if (grid.size() < 2)
      return false;
   const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
   for (std::size_t k = 1; k < grid.size(); ++k)
      if (std::fabs(grid[k] - grid[k - 1] - h) > 1e-9 * h)
         return false;
   return true;
}

} // namespace

GapProblem::GapProblem(ModelParams params, SolverConfig cfg)
    : params_(std::move(params)), cfg_(validated(cfg)),
      band_(make_band_curves(params_, tolerances_of(cfg_))),
      constants_(compute_constants(params_, band_, cfg_)),
      disc_(params_, cfg_.n_nodes)
{
}


GapSurface solve_surface(const GapProblem &problem, const std::vector<double> &T_grid)
{
   if (T_grid.empty())
      throw PreconditionError("solve_surface: empty temperature grid");
   for (std::size_t k = 0; k < T_grid.size(); ++k) {
      if (!(T_grid[k] >= 0.0))
         throw DomainError("solve_surface: temperatures must be nonnegative");
      if (k > 0 && !(T_grid[k] > T_grid[k - 1]))
         throw PreconditionError("solve_surface: temperature grid must be increasing");
   }
   if (!(T_grid.back() < problem.constants().tau0))
      throw DomainError("solve_surface: temperatures must stay below tau0");

   GapSurface surface{problem.params(), T_grid, {}, problem.constants().gamma, {}, {}};
   surface.slices.reserve(T_grid.size());
   for (double T : T_grid) {
      try {
         surface.slices.push_back(solve_slice(problem.discretization(), problem.band(), T, problem.config()));
      } catch (const SliceNonConvergenceError &e) {
         throw SliceNonConvergenceError(T, e.last(), std::move(surface.slices));
      }
   }

   if (T_grid.size() >= 5 && is_uniform(T_grid)) {
      auto [d1, d2] = temperature_derivatives(surface);
      surface.dT1 = std::move(d1);
      surface.dT2 = std::move(d2);
   }
   return surface;
}

GapSurface solve_surface(const ModelParams &params, const std::vector<double> &T_grid, const SolverConfig &cfg)
{
   return solve_surface(GapProblem(params, cfg), T_grid);
}

double evaluate(const GapSurface &surface, double T, double x)
{
   const auto &temps = surface.T_grid;
   const auto &nodes = surface.nodes();
   if (!(T >= temps.front() && T <= temps.back()))
      throw DomainError("evaluate: T outside the solved temperature range");
   if (!(x >= nodes.front() && x <= nodes.back()))
      throw DomainError("evaluate: x outside [0, hbar_omega_D]");

   const auto locate = [](const std::vector<double> &grid, double v) {
      if (grid.size() == 1)
         return std::pair<std::size_t, double>{0, 0.0};
      auto it = std::upper_bound(grid.begin(), grid.end(), v);
      auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - grid.begin() - 1));
      k = std::min(k, grid.size() - 2);
      return std::pair{k, (v - grid[k]) / (grid[k + 1] - grid[k])};
   };

   const auto [t, wt] = locate(temps, T);
   const auto [j, wx] = locate(nodes, x);
   if (temps.size() == 1)
      return (1 - wx) * surface.midpoint(0, j) + wx * surface.midpoint(0, j + 1);

   const double lo = (1 - wx) * surface.midpoint(t, j) + wx * surface.midpoint(t, j + 1);
   const double hi = (1 - wx) * surface.midpoint(t + 1, j) + wx * surface.midpoint(t + 1, j + 1);
   if (wt == 0.0)
      return lo;
   if (wt == 1.0)
      return hi;
   return (1 - wt) * lo + wt * hi;
}

std::pair<NodeTable, NodeTable> temperature_derivatives(const GapSurface &surface)
{
   const auto &temps = surface.T_grid;
   const std::size_t m = temps.size();
   if (m < 5)
      throw ConfigError("temperature_derivatives: need at least 5 temperatures");
   if (!is_uniform(temps))
      throw ConfigError("temperature_derivatives: temperature grid must be uniform");

   const double h = (temps.back() - temps.front()) / static_cast<double>(m - 1);
   const std::size_t n = surface.nodes().size();
   NodeTable d1(m, std::vector<double>(n));
   NodeTable d2(m, std::vector<double>(n));

   for (std::size_t j = 0; j < n; ++j) {
      const auto f = [&](std::size_t t) { return surface.midpoint(t, j); };
      for (std::size_t t = 1; t + 1 < m; ++t) {
         d1[t][j] = (f(t + 1) - f(t - 1)) / (2 * h);
         d2[t][j] = (f(t + 1) - 2 * f(t) + f(t - 1)) / (h * h);
      }
      d1[0][j] = (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
      d1[m - 1][j] = (3 * f(m - 1) - 4 * f(m - 2) + f(m - 3)) / (2 * h);
      d2[0][j] = (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / (h * h);
      d2[m - 1][j] = (2 * f(m - 1) - 5 * f(m - 2) + 4 * f(m - 3) - f(m - 4)) / (h * h);
   }
   return {std::move(d1), std::move(d2)};
}

} // namespace bcsgap
