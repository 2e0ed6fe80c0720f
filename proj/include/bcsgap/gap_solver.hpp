#pragma once

// Nystrom discretisation of the gap operator
//
//   (A u)(x) = int_0^{hbar omega} U(x, xi) u(xi) / s * tanh(s / 2T) dxi,
//   s = sqrt(xi^2 + u(xi)^2),
//
// and its solution per temperature by two-sided monotone iteration. A is
// order preserving and maps the band [Delta1(T), Delta2(T)] into itself, so
// iterating from the constant Delta2(T) gives a nonincreasing sequence and
// from Delta1(T) a nondecreasing one; both converge to the unique fixed point
// and their gap is an enclosure certificate.

#include "bcsgap/constant_gap.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/lipschitz_bounds.hpp"
#include "bcsgap/model.hpp"
#include "bcsgap/numerics.hpp"

#include <span>
#include <utility>
#include <vector>

namespace bcsgap {

// The two constant-coupling curves that sandwich every solution.
struct BandCurves {
   GapCurve lower; // coupling U1
   GapCurve upper; // coupling U2
};

BandCurves make_band_curves(const ModelParams &params, const Tolerances &tol);

inline Tolerances tolerances_of(const SolverConfig &cfg) { return {cfg.quad_tol, cfg.root_tol}; }

// Absolute tolerance on a tabulated gap value, scaled by the largest gap.
double curve_tolerance(const SolverConfig &cfg, const BandCurves &band);

struct CriticalConstants {
   double z0 = 0.0;
   double tau0 = 0.0;
   double tau1 = 0.0;
   double tau2 = 0.0;
   double delta1_0 = 0.0;
   double delta2_0 = 0.0;
   double tau = 0.0;
   double a = 0.0;
   double b = 0.0;
   double gamma = 0.0;
   double tc_lower = 0.0; // tau1
   double tc_upper = 0.0; // tau2
};

/// Everything up to gamma. Throws CouplingWindowError if U2 a >= 1.
CriticalConstants compute_constants(const ModelParams &params, const BandCurves &band,
                                    const SolverConfig &cfg);

// Operator context: nodes, weights and the weighted kernel U(x_i, xi_j) w_j.
// Immutable after construction.
class Discretization {
public:
   Discretization(const ModelParams &params, int n_nodes);

   std::size_t size() const noexcept { return rule_.size(); }
   const std::vector<double> &nodes() const noexcept { return rule_.nodes; }
   const std::vector<double> &weights() const noexcept { return rule_.weights; }
   const numerics::QuadratureRule &rule() const noexcept { return rule_; }
   double kernel(std::size_t i, std::size_t j) const { return kernel_[i * size() + j]; }
   double hbar_omega_D() const noexcept { return hbar_omega_D_; }

   /// (A u) at every node. Requires T >= 0 and u >= 0 (DomainError otherwise).
   std::vector<double> apply(std::span<const double> u, double T) const;

private:
   numerics::QuadratureRule rule_;
   std::vector<double> kernel_;   // row-major U(x_i, xi_j)
   std::vector<double> weighted_; // row-major U(x_i, xi_j) w_j
   double hbar_omega_D_;
};

inline Discretization build_discretization(const ModelParams &params, int n_nodes)
{
   return Discretization(params, n_nodes);
}

inline std::vector<double> apply_A(const Discretization &ctx, std::span<const double> u, double T)
{
   return ctx.apply(u, T);
}

struct IterationCounts {
   int upper = 0;
   int lower = 0;
};

struct GapSlice {
   double T = 0.0;
   std::vector<double> nodes;
   std::vector<double> upper; // limit of the sequence started at Delta2(T)
   std::vector<double> lower; // limit of the sequence started at Delta1(T)
   double enclosure_width = 0.0;
   IterationCounts iterations;
   double delta1 = 0.0; // Delta1(T)
   double delta2 = 0.0; // Delta2(T)
   // Largest breach seen during the run (0 when none): growth of the upper /
   // decay of the lower sequence, and excursion outside the band.
   double monotonicity_violation = 0.0;
   double bracket_violation = 0.0;

   std::vector<double> midpoint() const;
};

class SliceNonConvergenceError : public NonConvergenceError {
public:
   SliceNonConvergenceError(double T, GapSlice last, std::vector<GapSlice> completed = {});

   double temperature() const noexcept { return T_; }
   const GapSlice &last() const noexcept { return last_; }
   const std::vector<GapSlice> &completed() const noexcept { return completed_; }

private:
   double T_;
   GapSlice last_;
   std::vector<GapSlice> completed_;
};

/// Two-sided monotone iteration at one temperature. Each direction stops once
/// its successive sup-norm change drops below cfg.fp_tol. Throws
/// SliceNonConvergenceError (with the last enclosure) after cfg.max_iter steps.
GapSlice solve_slice(const Discretization &ctx, const BandCurves &band, double T,
                     const SolverConfig &cfg);

// sup_i |u_i - (A u)_i| at the slice midpoint.
double residual_certificate(const Discretization &ctx, const GapSlice &slice);

using NodeTable = std::vector<std::vector<double>>; // [temperature][node]

struct GapSurface {
   ModelParams params;
   std::vector<double> T_grid;
   std::vector<GapSlice> slices;
   double gamma = 0.0;
   NodeTable dT1;
   NodeTable dT2;

   double midpoint(std::size_t t, std::size_t node) const
   {
      return 0.5 * (slices[t].upper[node] + slices[t].lower[node]);
   }
   const std::vector<double> &nodes() const { return slices.front().nodes; }
   double max_enclosure_width() const;
};

// n uniformly spaced temperatures on [0, tau], both ends included.
std::vector<double> uniform_grid(double tau, int n);

// Everything a surface solve needs, computed once: the band curves, the
// constants (window checked) and the discretisation.
class GapProblem {
public:
   GapProblem(ModelParams params, SolverConfig cfg);

   const ModelParams &params() const noexcept { return params_; }
   const SolverConfig &config() const noexcept { return cfg_; }
   const BandCurves &band() const noexcept { return band_; }
   const CriticalConstants &constants() const noexcept { return constants_; }
   const Discretization &discretization() const noexcept { return disc_; }

   std::vector<double> default_grid() const { return uniform_grid(constants_.tau, cfg_.n_T); }

private:
   ModelParams params_;
   SolverConfig cfg_;
   BandCurves band_;
   CriticalConstants constants_;
   Discretization disc_;
};

/// One slice per grid temperature plus finite-difference derivative tables
/// (when the grid is uniform with at least 5 points). The grid must be
/// increasing inside [0, tau0). Slice failures are rethrown annotated with T
/// and the slices completed so far.
GapSurface solve_surface(const GapProblem &problem, const std::vector<double> &T_grid);
GapSurface solve_surface(const ModelParams &params, const std::vector<double> &T_grid,
                         const SolverConfig &cfg);

/// Bilinear interpolation of the midpoint values on T_grid x nodes.
double evaluate(const GapSurface &surface, double T, double x);

/// First and second T-derivatives: central differences inside, one-sided
/// second order at both ends. Needs a uniform grid of >= 5 temperatures
/// (ConfigError otherwise).
std::pair<NodeTable, NodeTable> temperature_derivatives(const GapSurface &surface);

} // namespace bcsgap
