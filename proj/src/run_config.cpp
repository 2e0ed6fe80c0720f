#include "bcsgap/run_config.hpp"

#include "bcsgap/constant_gap.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/lipschitz_bounds.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bcsgap {

using nlohmann::json;

namespace {

void only_keys(const json &obj, const std::string &where, std::initializer_list<const char *> allowed)
{
   if (!obj.is_object())
      throw ConfigError(where + ": expected an object");
   const std::set<std::string> keys(allowed.begin(), allowed.end());
   for (const auto &item : obj.items())
      if (keys.count(item.key()) == 0)
         throw ConfigError(where + ": unknown field '" + item.key() + "'");
}

const json &required(const json &obj, const std::string &where, const char *key)
{
   if (!obj.contains(key))
      throw ConfigError(where + ": missing field '" + key + "'");
   return obj.at(key);
}

double number(const json &v, const std::string &name)
{
   if (!v.is_number())
      throw ConfigError(name + ": expected a number");
   return v.get<double>();
}

int integer(const json &v, const std::string &name)
{
   if (!v.is_number_integer())
      throw ConfigError(name + ": expected an integer");
   const auto i = v.get<std::int64_t>();
   if (i < INT32_MIN || i > INT32_MAX)
      throw ConfigError(name + ": out of range");
   return static_cast<int>(i);
}

bool boolean(const json &v, const std::string &name)
{
   if (!v.is_boolean())
      throw ConfigError(name + ": expected true or false");
   return v.get<bool>();
}

std::vector<double> number_array(const json &v, const std::string &name)
{
   if (!v.is_array())
      throw ConfigError(name + ": expected an array");
   std::vector<double> out;
   for (std::size_t k = 0; k < v.size(); ++k)
      out.push_back(number(v[k], name + "[" + std::to_string(k) + "]"));
   return out;
}

SolverConfig parse_solver(const json &doc)
{
   SolverConfig s;
   if (!doc.contains("solver"))
      return s;
   const json &j = doc.at("solver");
   only_keys(j, "solver", {"n_nodes", "n_T", "tau_fraction", "quad_tol", "root_tol", "fp_tol", "max_iter", "seed"});
   if (j.contains("n_nodes"))
      s.n_nodes = integer(j["n_nodes"], "solver.n_nodes");
   if (j.contains("n_T"))
      s.n_T = integer(j["n_T"], "solver.n_T");
   if (j.contains("tau_fraction"))
      s.tau_fraction = number(j["tau_fraction"], "solver.tau_fraction");
   if (j.contains("quad_tol"))
      s.quad_tol = number(j["quad_tol"], "solver.quad_tol");
   if (j.contains("root_tol"))
      s.root_tol = number(j["root_tol"], "solver.root_tol");
   if (j.contains("fp_tol"))
      s.fp_tol = number(j["fp_tol"], "solver.fp_tol");
   if (j.contains("max_iter"))
      s.max_iter = integer(j["max_iter"], "solver.max_iter");
   if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned())
         throw ConfigError("solver.seed: expected a nonnegative integer");
      s.seed = j["seed"].get<std::uint64_t>();
   }
   return s;
}

OutputConfig parse_output(const json &doc)
{
   OutputConfig o;
   if (!doc.contains("output"))
      return o;
   const json &j = doc.at("output");
   only_keys(j, "output", {"directory", "csv", "json", "curve_points"});
   if (j.contains("directory")) {
      if (!j["directory"].is_string() || j["directory"].get<std::string>().empty())
         throw ConfigError("output.directory: expected a nonempty string");
      o.directory = j["directory"].get<std::string>();
   }
   if (j.contains("csv"))
      o.csv = boolean(j["csv"], "output.csv");
   if (j.contains("json"))
      o.json = boolean(j["json"], "output.json");
   if (j.contains("curve_points"))
      o.curve_points = integer(j["curve_points"], "output.curve_points");
   if (o.curve_points < 2)
      throw ConfigError("output.curve_points: must be at least 2");
   return o;
}

PotentialSpec parse_potential(const json &j, double U1, double U2)
{
   const std::string where = "model.potential";
   if (!j.is_object())
      throw ConfigError(where + ": expected an object");
   const json &kind = required(j, where, "kind");
   if (!kind.is_string())
      throw ConfigError(where + ".kind: expected a string");
   const auto k = kind.get<std::string>();

   if (k == "constant") {
      only_keys(j, where, {"kind", "value"});
      const json &v = required(j, where, "value");
      if (v.is_string()) {
         if (v == "U1")
            return ConstantPotential{U1};
         if (v == "U2")
            return ConstantPotential{U2};
         throw ConfigError(where + ".value: expected a number, \"U1\" or \"U2\"");
      }
      return ConstantPotential{number(v, where + ".value")};
   }
   if (k == "separable") {
      only_keys(j, where, {"kind", "shape", "amplitude"});
      SeparablePotential p;
      if (j.contains("shape")) {
         if (!j["shape"].is_string())
            throw ConfigError(where + ".shape: expected a string");
         p.kind = j["shape"].get<std::string>();
      }
      if (j.contains("amplitude"))
         p.amplitude = number(j["amplitude"], where + ".amplitude");
      return p;
   }
   if (k == "table") {
      only_keys(j, where, {"kind", "x", "xi", "values"});
      TablePotential p;
      p.x = number_array(required(j, where, "x"), where + ".x");
      p.xi = number_array(required(j, where, "xi"), where + ".xi");
      const json &rows = required(j, where, "values");
      if (!rows.is_array())
         throw ConfigError(where + ".values: expected an array of rows");
      for (std::size_t i = 0; i < rows.size(); ++i)
         p.values.push_back(number_array(rows[i], where + ".values[" + std::to_string(i) + "]"));
      return p;
   }
   throw ConfigError(where + ".kind: unknown potential kind '" + k + "'");
}

json potential_json(const PotentialSpec &spec)
{
   return std::visit(
       [](const auto &p) -> json {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ConstantPotential>)
             return {{"kind", "constant"}, {"value", p.value}};
          else if constexpr (std::is_same_v<P, SeparablePotential>)
             return {{"kind", "separable"}, {"shape", p.kind}, {"amplitude", p.amplitude}};
          else
             return {{"kind", "table"}, {"x", p.x}, {"xi", p.xi}, {"values", p.values}};
       },
       spec);
}

} // namespace

double auto_U2(double hbar_omega_D, double U1, const SolverConfig &solver)
{
   const Tolerances tol{solver.quad_tol, solver.root_tol};
   const GapCurve curve1(CouplingProblem(hbar_omega_D, U1), tol);
   const double tau0 = solve_tau0(curve1, solve_z0(solver.root_tol), solver.root_tol);
   const double a = compute_a(curve1, solver.tau_fraction * tau0, tau0);
   return U1 + 0.5 * (1.0 / a - U1);
}

RunConfig parse_run_config(const json &doc, std::optional<std::uint64_t> seed_override)
{
   only_keys(doc, "config", {"model", "solver", "output"});
   SolverConfig solver = parse_solver(doc);
   if (seed_override)
      solver.seed = *seed_override;
   solver.validate();
   const OutputConfig output = parse_output(doc);

   const json &m = required(doc, "config", "model");
   only_keys(m, "model", {"hbar_omega_D", "U1", "U2", "potential"});
   const double hbar = number(required(m, "model", "hbar_omega_D"), "model.hbar_omega_D");
   const double U1 = number(required(m, "model", "U1"), "model.U1");
   const json &u2 = required(m, "model", "U2");
   const bool U2_auto = u2.is_string() && u2 == "auto";
   if (u2.is_string() && !U2_auto)
      throw ConfigError("model.U2: expected a number or \"auto\"");
   if (!(hbar > 0.0) || !std::isfinite(hbar))
      throw ConfigError("model.hbar_omega_D: must be positive and finite");
   if (!(U1 > 0.0) || !std::isfinite(U1))
      throw ConfigError("model.U1: must be positive and finite");
   const double U2 = U2_auto ? auto_U2(hbar, U1, solver) : number(u2, "model.U2");

   PotentialSpec potential = SeparablePotential{};
   if (m.contains("potential"))
      potential = parse_potential(m["potential"], U1, U2);

   return RunConfig{ModelParams(hbar, U1, U2, std::move(potential)), solver, output, U2_auto};
}

RunConfig load_run_config(const std::string &path, std::optional<std::uint64_t> seed_override)
{
   std::ifstream in(path);
   if (!in)
      throw IoError("cannot read config file '" + path + "'");
   std::stringstream buffer;
   buffer << in.rdbuf();
   json doc;
   try {
      doc = json::parse(buffer.str());
   } catch (const json::parse_error &e) {
      throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
   }
   return parse_run_config(doc, seed_override);
}

json canonical_json(const RunConfig &cfg)
{
   const auto &m = cfg.model;
   const auto &s = cfg.solver;
   json model = json::object();
   model["hbar_omega_D"] = m.hbar_omega_D();
   model["U1"] = m.U1();
   model["U2"] = m.U2();
   model["U2_auto"] = cfg.U2_auto;
   model["potential"] = potential_json(m.potential());
   json solver = json::object();
   solver["n_nodes"] = s.n_nodes;
   solver["n_T"] = s.n_T;
   solver["tau_fraction"] = s.tau_fraction;
   solver["quad_tol"] = s.quad_tol;
   solver["root_tol"] = s.root_tol;
   solver["fp_tol"] = s.fp_tol;
   solver["max_iter"] = s.max_iter;
   solver["seed"] = s.seed;
   return {{"model", model}, {"solver", solver}};
}

std::string config_hash(const RunConfig &cfg)
{
   std::uint64_t h = 0xcbf29ce484222325ull;
   for (unsigned char c : canonical_json(cfg).dump()) {
      h ^= c;
      h *= 0x100000001b3ull;
   }
   char buf[17];
   std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
   return buf;
}

} // namespace bcsgap
