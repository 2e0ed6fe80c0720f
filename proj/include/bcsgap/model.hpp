#pragma once

// Problem description shared by the solver, the bound computations and the
// CLI: couplings, Debye cutoff, the potential U(x, xi) and solver settings.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bcsgap {

struct ConstantPotential {
   double value;
};

// Values on a rectilinear (x, xi) grid; values[i][j] belongs to (x[i], xi[j]).
// Evaluated by bilinear interpolation.
struct TablePotential {
   std::vector<double> x;
   std::vector<double> xi;
   std::vector<std::vector<double>> values;
};

// U1 + (U2 - U1) * amplitude * k(x) * k(xi), k(x) = sin(pi x / hbar_omega_D).
struct SeparablePotential {
   std::string kind = "sine";
   double amplitude = 1.0;
};

using PotentialSpec = std::variant<ConstantPotential, TablePotential, SeparablePotential>;

std::string potential_kind(const PotentialSpec &spec);

class ModelParams {
public:
   // Validates 0 < U1 < U2 and U1 <= U(x, xi) <= U2 on a 64 x 64 grid over
   // [0, hbar_omega_D]^2; throws ModelError naming the offending point.
   ModelParams(double hbar_omega_D, double U1, double U2, PotentialSpec potential);

   double hbar_omega_D() const noexcept { return hbar_omega_D_; }
   double U1() const noexcept { return U1_; }
   double U2() const noexcept { return U2_; }
   const PotentialSpec &potential() const noexcept { return potential_; }

   double potential_at(double x, double xi) const;

   // Same model with a different potential (used for constant-coupling runs).
   ModelParams with_potential(PotentialSpec potential) const;

private:
   double hbar_omega_D_;
   double U1_;
   double U2_;
   PotentialSpec potential_;
};

struct SolverConfig {
   int n_nodes = 64;
   int n_T = 33;
   double tau_fraction = 0.95;
   double quad_tol = 1e-12;
   double root_tol = 1e-13;
   double fp_tol = 1e-10;
   int max_iter = 10000;
   std::uint64_t seed = 20240601;

   // Throws ConfigError when any field is out of range.
   void validate() const;
};

} // namespace bcsgap
