#include "bcsgap/model.hpp"

#include "bcsgap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bcsgap {

namespace {

constexpr int kValidationGrid = 64;

double table_value(const TablePotential &t, double x, double xi)
{
   const auto locate = [](const std::vector<double> &grid, double v) {
      auto it = std::upper_bound(grid.begin(), grid.end(), v);
      auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - grid.begin() - 1));
      k = std::min(k, grid.size() - 2);
      const double w = (v - grid[k]) / (grid[k + 1] - grid[k]);
      return std::pair{k, std::clamp(w, 0.0, 1.0)};
   };
   const auto [i, wx] = locate(t.x, x);
   const auto [j, wy] = locate(t.xi, xi);
   const auto &v = t.values;
   const double blend = (1 - wx) * (1 - wy) * v[i][j] + wx * (1 - wy) * v[i + 1][j] +
                        (1 - wx) * wy * v[i][j + 1] + wx * wy * v[i + 1][j + 1];
   // The bilinear blend lies between its corner values; clamp away rounding.
   const auto [lo, hi] = std::minmax({v[i][j], v[i + 1][j], v[i][j + 1], v[i + 1][j + 1]});
   return std::clamp(blend, lo, hi);
}

void validate_table(const TablePotential &t, double hbar)
{
   const auto check_grid = [hbar](const std::vector<double> &g, const char *name) {
      if (g.size() < 2)
         throw ModelError(std::string("table potential: ") + name + " grid needs at least 2 points");
      for (std::size_t k = 1; k < g.size(); ++k)
         if (!(g[k] > g[k - 1]))
            throw ModelError(std::string("table potential: ") + name + " grid not strictly increasing");
      if (std::fabs(g.front()) > 1e-12 * hbar || std::fabs(g.back() - hbar) > 1e-12 * hbar)
         throw ModelError(std::string("table potential: ") + name + " grid must span [0, hbar_omega_D]");
   };
   check_grid(t.x, "x");
   check_grid(t.xi, "xi");
   if (t.values.size() != t.x.size())
      throw ModelError("table potential: values has wrong number of rows");
   for (const auto &row : t.values)
      if (row.size() != t.xi.size())
         throw ModelError("table potential: values row has wrong length");
}

} // namespace

std::string potential_kind(const PotentialSpec &spec)
{
   struct Visitor {
      std::string operator()(const ConstantPotential &) const { return "constant"; }
      std::string operator()(const TablePotential &) const { return "table"; }
      std::string operator()(const SeparablePotential &) const { return "separable"; }
   };
   return std::visit(Visitor{}, spec);
}

ModelParams::ModelParams(double hbar_omega_D, double U1, double U2, PotentialSpec potential)
    : hbar_omega_D_(hbar_omega_D), U1_(U1), U2_(U2), potential_(std::move(potential))
{
   if (!std::isfinite(hbar_omega_D) || !(hbar_omega_D > 0.0))
      throw ModelError("hbar_omega_D must be finite and positive");
   if (!std::isfinite(U1) || !std::isfinite(U2) || !(U1 > 0.0) || !(U1 < U2))
      throw ModelError("couplings must satisfy 0 < U1 < U2");

   if (const auto *t = std::get_if<TablePotential>(&potential_))
      validate_table(*t, hbar_omega_D);
   if (const auto *s = std::get_if<SeparablePotential>(&potential_)) {
      if (s->kind != "sine")
         throw ModelError("separable potential: unknown kind '" + s->kind + "'");
      if (!(s->amplitude >= 0.0 && s->amplitude <= 1.0))
         throw ModelError("separable potential: amplitude must lie in [0, 1]");
   }

   for (int i = 0; i < kValidationGrid; ++i) {
      for (int j = 0; j < kValidationGrid; ++j) {
         const double x = hbar_omega_D * i / (kValidationGrid - 1);
         const double xi = hbar_omega_D * j / (kValidationGrid - 1);
         const double u = potential_at(x, xi);
         if (!(u >= U1 && u <= U2)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "potential U(" << x << ", " << xi << ") = " << u << " lies outside [U1, U2] = [" << U1
                << ", " << U2 << "]";
            throw ModelError(msg.str());
         }
      }
   }
}

double ModelParams::potential_at(double x, double xi) const
{
   struct Visitor {
      const ModelParams &m;
      double x, xi;
      double operator()(const ConstantPotential &c) const { return c.value; }
      double operator()(const TablePotential &t) const { return table_value(t, x, xi); }
      double operator()(const SeparablePotential &s) const
      {
         const double k = std::numbers::pi / m.hbar_omega_D_;
         const double bump = s.amplitude * std::sin(k * x) * std::sin(k * xi);
         return std::clamp(m.U1_ + (m.U2_ - m.U1_) * bump, m.U1_, m.U2_);
      }
   };
   return std::visit(Visitor{*this, x, xi}, potential_);
}

ModelParams ModelParams::with_potential(PotentialSpec potential) const
{
   return ModelParams(hbar_omega_D_, U1_, U2_, std::move(potential));
}

void SolverConfig::validate() const
{
   if (n_nodes < 16)
      throw ConfigError("n_nodes must be at least 16");
   if (n_T < 5)
      throw ConfigError("n_T must be at least 5");
   if (!(tau_fraction > 0.0 && tau_fraction < 1.0))
      throw ConfigError("tau_fraction must lie in (0, 1)");
   if (!(quad_tol > 0.0) || !(root_tol > 0.0) || !(fp_tol > 0.0))
      throw ConfigError("tolerances must be positive");
   if (max_iter < 1)
      throw ConfigError("max_iter must be positive");
}

} // namespace bcsgap
