#include "bcsgap/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
   CLI::App app{"Numerical solution and conformance checks for the BCS gap equation"};
   app.require_subcommand(1);

   bcsgap::CommandOptions options;
   std::string out_dir;
   std::uint64_t seed = 0;

   const std::vector<std::pair<std::string, std::string>> commands = {
       {"constants", "critical temperatures, z0, tau0 and the Lipschitz constants a, b, gamma (JSON)"},
       {"curve", "gap curves Delta1(T), Delta2(T) on [0, tau2] (CSV)"},
       {"solve", "gap surface u(T, x) with its enclosure (CSV + JSON metadata)"},
       {"derivatives", "first and second temperature derivatives of the surface (CSV)"},
       {"verify", "conformance report; exit 0 iff every check passes"},
   };
   for (const auto &[name, help] : commands) {
      auto *sub = app.add_subcommand(name, help);
      sub->add_option("--config", options.config_path, "JSON configuration file")->required();
      sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
      sub->add_option("--seed", seed, "random seed (overrides solver.seed)");
   }

   try {
      app.parse(argc, argv);
   } catch (const CLI::ParseError &e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : bcsgap::kExitConfig;
   }

   const auto *sub = app.get_subcommands().front();
   if (sub->count("--out") > 0)
      options.out_dir = out_dir;
   if (sub->count("--seed") > 0)
      options.seed = seed;
   return bcsgap::run_command(sub->get_name(), options, std::cout, std::cerr);
}
