#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "levdyn/cli.hpp"

int main(int argc, char** argv) {
  using namespace levdyn;
  CLI::App app{"Coupled librational/translational dynamics of a levitated ellipsoid"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  unsigned workers = 0;
  std::string units;
  bool paper_formula = false;
  std::uint64_t seed = 0;

  app.add_option("--config", config_path, "JSON run configuration (defaults when omitted)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--units", units, "drive unit convention")->check(CLI::IsMember({"si", "normalized"}));
  app.add_flag("--paper-formula", paper_formula, "use the printed eta_thetay expression");
  auto* seed_opt = app.add_option("--seed", seed, "seed for the props subcommand");

  const char* help[] = {"parameter report and coefficient table", "steady-state branches at the configured drive",
                        "two-axis multistability map", "mean-field trajectory", "cooling report and sweeps",
                        "truncated-Fock validation report", "seeded randomized property checks"};
  for (std::size_t i = 0; i < cli::subcommands().size(); ++i) app.add_subcommand(cli::subcommands()[i], help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::schema;
  }

  config::CommandLineOverrides ov;
  if (!units.empty()) ov.units = units;
  ov.paper_formula = paper_formula;
  if (seed_opt->count()) ov.seed = seed;
  if (!out_dir.empty()) ov.output_dir = out_dir;
  if (workers) ov.workers = workers;

  config::RunConfig cfg;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      text = ss.str();
    }
    cfg = config::parse_config_text(text, ov);
  } catch (const config::SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::schema;
  } catch (const config::PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << "\n";
    return cli::physics;
  }
  return cli::execute(cfg, app.get_subcommands().front()->get_name());
}
