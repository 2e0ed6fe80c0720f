#pragma once

// Test-only reference computations. Deliberately naive (dense trapezoid,
// plain bisection) and independent of the library's adaptive routines.

#include <cmath>
#include <cstdint>
#include <functional>

namespace oracle {

inline double trapezoid(const std::function<double(double)> &f, double lo, double hi, int n)
{
   const double h = (hi - lo) / n;
   double sum = 0.5 * (f(lo) + f(hi));
   for (int k = 1; k < n; ++k)
      sum += f(lo + k * h);
   return sum * h;
}

inline double bisect(const std::function<double(double)> &f, double lo, double hi, double tol)
{
   const bool neg_lo = f(lo) < 0;
   while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if ((f(mid) < 0) == neg_lo)
         lo = mid;
      else
         hi = mid;
   }
   return 0.5 * (lo + hi);
}

// Gap-equation residual U * int tanh(s/2T)/s - 1 by the trapezoid rule, with
// a graded split at 20*delta so the peak near xi = 0 is resolved.
inline double gap_residual(double hbar, double U, double delta, double T, int n = 40000)
{
   const auto f = [&](double xi) {
      const double s = std::sqrt(xi * xi + delta * delta);
      if (T == 0.0)
         return 1.0 / s;
      if (s == 0.0)
         return 1.0 / (2 * T);
      return std::tanh(s / (2 * T)) / s;
   };
   const double split = std::min(hbar, 20 * std::max(delta, T));
   double total = trapezoid(f, 0.0, split, n);
   if (split < hbar)
      total += trapezoid(f, split, hbar, n);
   return U * total - 1.0;
}

inline double gap_value(double hbar, double U, double T)
{
   const double d0 = hbar / std::sinh(1.0 / U);
   const auto f = [&](double d) { return gap_residual(hbar, U, d, T); };
   if (f(1e-9 * d0) <= 0)
      return 0.0;
   return bisect(f, 1e-9 * d0, 1.5 * d0, 1e-12 * d0);
}

inline double tau_c(double hbar, double U)
{
   const auto f = [&](double tau) { return gap_residual(hbar, U, 0.0, tau); };
   return bisect(f, 1e-4 * hbar, hbar, 1e-13 * hbar);
}

// SplitMix64, for reproducible test samples.
struct Rng {
   std::uint64_t state;
   std::uint64_t next()
   {
      std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      return z ^ (z >> 31);
   }
   double uniform(double lo = 0.0, double hi = 1.0)
   {
      return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
   }
};

} // namespace oracle
