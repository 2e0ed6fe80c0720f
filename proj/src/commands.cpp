#include "bcsgap/commands.hpp"

#include "bcsgap/errors.hpp"
#include "bcsgap/gap_solver.hpp"
#include "bcsgap/lipschitz_bounds.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace bcsgap {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects output files and writes them together with the manifest.
class Artifacts {
public:
   Artifacts(const RunConfig &cfg, std::string command, std::string directory)
       : cfg_(cfg), command_(std::move(command)), dir_(std::move(directory)), hash_(config_hash(cfg))
   {
   }

   const std::string &hash() const { return hash_; }
   std::string csv_header() const { return std::string("# ") + kToolVersion + " config_hash=" + hash_ + "\n"; }

   // JSON objects get the provenance fields up front.
   json stamped(json body) const
   {
      json out = {{"tool_version", kToolVersion}, {"config_hash", hash_}};
      for (auto &item : body.items())
         out[item.key()] = item.value();
      return out;
   }

   void add(const std::string &name, std::string content) { files_.emplace_back(name, std::move(content)); }
   void add_csv(const std::string &name, const std::string &body)
   {
      if (cfg_.output.csv)
         add(name, csv_header() + body);
   }
   void add_json(const std::string &name, const json &doc)
   {
      if (cfg_.output.json)
         add(name, doc.dump(2) + "\n");
   }

   void flush(int exit_code, const json &failure = nullptr)
   {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec)
         throw IoError("cannot create output directory '" + dir_ + "': " + ec.message());
      json manifest = stamped({{"command", command_},
                               {"exit_code", exit_code},
                               {"status", exit_code == kExitOk ? "ok" : "failed"},
                               {"files", json::array()}});
      for (const auto &[name, content] : files_) {
         write(name, content);
         manifest["files"].push_back(name);
      }
      if (!failure.is_null())
         manifest["failure"] = failure;
      write("MANIFEST.json", manifest.dump(2) + "\n");
   }

private:
   void write(const std::string &name, const std::string &content) const
   {
      const auto path = fs::path(dir_) / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << content;
      out.flush();
      if (!out)
         throw IoError("cannot write '" + path.string() + "'");
   }

   const RunConfig &cfg_;
   std::string command_;
   std::string dir_;
   std::string hash_;
   std::vector<std::pair<std::string, std::string>> files_;
};

void csv_row(std::ostringstream &os, std::initializer_list<double> values)
{
   bool first = true;
   for (double v : values) {
      if (!first)
         os << ',';
      os << format_double(v);
      first = false;
   }
   os << '\n';
}

json location_json(const std::optional<CheckLocation> &loc)
{
   if (!loc)
      return nullptr;
   return {{"T", loc->T}, {"x", loc->x}};
}

const char *status_name(CheckStatus s)
{
   switch (s) {
   case CheckStatus::Evaluated:
      return "evaluated";
   case CheckStatus::Skipped:
      return "skipped";
   case CheckStatus::Errored:
      return "errored";
   }
   return "errored";
}

std::string surface_csv(const std::vector<GapSlice> &slices)
{
   std::ostringstream os;
   os << "T,x,u_mid,u_lower,u_upper,enclosure\n";
   for (const auto &s : slices)
      for (std::size_t j = 0; j < s.nodes.size(); ++j) {
         const double mid = 0.5 * (s.upper[j] + s.lower[j]);
         csv_row(os, {s.T, s.nodes[j], mid, s.lower[j], s.upper[j], s.upper[j] - s.lower[j]});
      }
   return os.str();
}

json slice_json(const Discretization &ctx, const GapSlice &s)
{
   return {{"T", s.T},
           {"delta1", s.delta1},
           {"delta2", s.delta2},
           {"enclosure_width", s.enclosure_width},
           {"residual", residual_certificate(ctx, s)},
           {"iterations_upper", s.iterations.upper},
           {"iterations_lower", s.iterations.lower},
           {"monotonicity_violation", s.monotonicity_violation},
           {"bracket_violation", s.bracket_violation}};
}

json critical_json(const CriticalConstants &c)
{
   return {{"z0", c.z0},
           {"tau0", c.tau0},
           {"tau1", c.tau1},
           {"tau2", c.tau2},
           {"delta1_0", c.delta1_0},
           {"delta2_0", c.delta2_0},
           {"tau", c.tau},
           {"a", c.a},
           {"b", c.b},
           {"gamma", c.gamma},
           {"tc_lower", c.tc_lower},
           {"tc_upper", c.tc_upper},
           {"tau0_over_tau1", c.tau0 / c.tau1},
           {"tau0_over_tau2", c.tau0 / c.tau2}};
}

int cmd_constants(const RunConfig &cfg, Artifacts &art, std::ostream &out)
{
   const json doc = art.stamped(constants_json(cfg));
   art.add_json("constants.json", doc);
   art.flush(kExitOk);
   out << doc.dump(2) << "\n";
   return kExitOk;
}

int cmd_curve(const RunConfig &cfg, Artifacts &art, std::ostream &out)
{
   const auto band = make_band_curves(cfg.model, tolerances_of(cfg.solver));
   const double tau2 = band.upper.tau_c();
   const int n = cfg.output.curve_points;
   std::ostringstream os;
   os << "T,delta1,delta2\n";
   for (int k = 0; k < n; ++k) {
      const double T = k == n - 1 ? tau2 : tau2 * k / (n - 1);
      csv_row(os, {T, band.lower.value(T), band.upper.value(T)});
   }
   art.add_csv("curve.csv", os.str());
   art.flush(kExitOk);
   out << "curve: " << n << " rows on [0, " << format_double(tau2) << "]\n";
   return kExitOk;
}

// Shared by solve and derivatives; partial results are flushed on a slice failure.
int with_surface(const RunConfig &cfg, Artifacts &art, std::ostream &out,
                 const std::function<void(const GapProblem &, const GapSurface &)> &emit)
{
   const GapProblem problem(cfg.model, cfg.solver);
   std::optional<GapSurface> surface;
   try {
      surface.emplace(solve_surface(problem, problem.default_grid()));
   } catch (const SliceNonConvergenceError &e) {
      art.add_csv("surface.partial.csv", surface_csv(e.completed()));
      const json failure = {{"reason", "slice did not converge"},
                            {"failed_T", e.temperature()},
                            {"completed_slices", e.completed().size()},
                            {"last_enclosure_width", e.last().enclosure_width},
                            {"message", e.what()}};
      art.flush(kExitNonConvergence, failure);
      throw;
   }
   emit(problem, *surface);
   art.flush(kExitOk);
   out << "solved " << surface->slices.size() << " temperatures x " << surface->nodes().size()
       << " nodes; max enclosure width " << format_double(surface->max_enclosure_width()) << "\n";
   return kExitOk;
}

int cmd_solve(const RunConfig &cfg, Artifacts &art, std::ostream &out)
{
   return with_surface(cfg, art, out, [&](const GapProblem &problem, const GapSurface &surface) {
      art.add_csv("surface.csv", surface_csv(surface.slices));
      json slices = json::array();
      double max_residual = 0.0;
      for (const auto &s : surface.slices) {
         slices.push_back(slice_json(problem.discretization(), s));
         max_residual = std::max(max_residual, slices.back()["residual"].get<double>());
      }
      art.add_json("solve.json", art.stamped({{"constants", critical_json(problem.constants())},
                                              {"max_enclosure_width", surface.max_enclosure_width()},
                                              {"max_residual", max_residual},
                                              {"slices", slices}}));
   });
}

int cmd_derivatives(const RunConfig &cfg, Artifacts &art, std::ostream &out)
{
   return with_surface(cfg, art, out, [&](const GapProblem &, const GapSurface &surface) {
      std::ostringstream os;
      os << "T,x,du_dT,d2u_dT2\n";
      for (std::size_t t = 0; t < surface.T_grid.size(); ++t)
         for (std::size_t j = 0; j < surface.nodes().size(); ++j)
            csv_row(os, {surface.T_grid[t], surface.nodes()[j], surface.dT1[t][j], surface.dT2[t][j]});
      art.add_csv("derivatives.csv", os.str());
   });
}

int cmd_verify(const RunConfig &cfg, Artifacts &art, std::ostream &out)
{
   const auto results = run_all(cfg.model, cfg.solver);
   const json report = report_json(results);
   art.add_json("report.json", report);

   bool window_ok = true;
   for (const auto &r : results) {
      if (r.check_id == "coupling_window")
         window_ok = r.passed;
      out << (r.passed ? "PASS " : "FAIL ") << r.check_id << " [" << r.paper_anchor
          << "] worst=" << format_double(r.worst_violation) << " slack=" << format_double(r.slack);
      if (!r.note.empty())
         out << " (" << r.note << ")";
      out << "\n";
   }
   const int code = !window_ok ? kExitConfig : all_passed(results) ? kExitOk : kExitVerifyFailed;
   art.flush(code);
   return code;
}

} // namespace

std::string format_double(double v)
{
   char buf[32];
   std::snprintf(buf, sizeof buf, "%.17g", v);
   return buf;
}

json window_json(const CouplingWindowReport &r)
{
   return {{"U2", r.U2}, {"a", r.a},           {"U2a", r.U2a},
           {"margin", r.margin}, {"max_U2", r.max_U2}, {"satisfied", r.satisfied}};
}

json constants_json(const RunConfig &cfg)
{
   const GapProblem problem(cfg.model, cfg.solver);
   json doc = critical_json(problem.constants());
   doc["U1"] = cfg.model.U1();
   doc["U2"] = cfg.model.U2();
   doc["hbar_omega_D"] = cfg.model.hbar_omega_D();
   // The temperature-dependent reading of a; shown for comparison only.
   const auto &c = problem.constants();
   doc["diagnostics"] = {
       {"a_literal_2T",
        compute_a_estimate(problem.band().lower, c.tau, c.tau0, 256, AReading::Literal2T).refined_value}};
   return doc;
}

json report_json(const std::vector<CheckResult> &results)
{
   json arr = json::array();
   for (const auto &r : results)
      arr.push_back({{"check_id", r.check_id},
                     {"paper_anchor", r.paper_anchor},
                     {"passed", r.passed},
                     {"worst_violation", r.worst_violation},
                     {"location", location_json(r.location)},
                     {"slack", r.slack},
                     {"status", status_name(r.status)},
                     {"note", r.note}});
   return arr;
}

const std::vector<std::string> &command_names()
{
   static const std::vector<std::string> names = {"constants", "curve", "solve", "derivatives", "verify"};
   return names;
}

int run_command(const std::string &command, const CommandOptions &options, std::ostream &out,
                std::ostream &err)
{
   using Handler = int (*)(const RunConfig &, Artifacts &, std::ostream &);
   Handler handler = nullptr;
   if (command == "constants")
      handler = cmd_constants;
   else if (command == "curve")
      handler = cmd_curve;
   else if (command == "solve")
      handler = cmd_solve;
   else if (command == "derivatives")
      handler = cmd_derivatives;
   else if (command == "verify")
      handler = cmd_verify;
   else {
      err << "error: unknown command '" << command << "'\n";
      return kExitConfig;
   }

   try {
      const RunConfig cfg = load_run_config(options.config_path, options.seed);
      Artifacts art(cfg, command, options.out_dir.value_or(cfg.output.directory));
      try {
         return handler(cfg, art, out);
      } catch (const CouplingWindowError &e) {
         const json report = window_json(e.report());
         art.add_json("coupling_window.json", art.stamped({{"coupling_window", report}}));
         art.flush(kExitConfig, {{"reason", "coupling window violated"}, {"coupling_window", report}});
         out << report.dump(2) << "\n";
         err << "error: " << e.what() << "\n";
         return kExitConfig;
      }
   } catch (const IoError &e) {
      err << "error: " << e.what() << "\n";
      return kExitIo;
   } catch (const NonConvergenceError &e) {
      err << "error: " << e.what() << "\n";
      return kExitNonConvergence;
   } catch (const Error &e) {
      err << "error: " << e.what() << "\n";
      return kExitConfig;
   }
}

} // namespace bcsgap
