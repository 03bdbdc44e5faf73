// verify: run the torsor check suite on a JSON config or a built-in demo.
#include <iostream>

#include "CLI11.hpp"
#include "cplxtorsor/verifier.hpp"

namespace vf = cplxtorsor::verifier;

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of the torsor identities on a complex torus"};
  std::string config_path, demo, out, checks;
  int grid = 0;
  std::uint64_t seed = 0;
  double tol = 0;
  auto* config_opt = app.add_option("--config", config_path, "JSON configuration file");
  auto* demo_opt = app.add_option("--demo", demo, "built-in config")
                       ->check(CLI::IsMember({"principal-g1", "principal-g2", "trivial"}));
  config_opt->excludes(demo_opt);
  app.add_option("--out", out, "report path (default from config, else report.json)");
  app.add_option("--checks", checks, "comma-separated subset of checks");
  auto* grid_opt = app.add_option("--grid", grid, "grid points per real dimension")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
  auto* tol_opt = app.add_option("--tol", tol, "tolerance for the finite-difference checks")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  if (config_path.empty() && demo.empty()) {
    std::cerr << "verify: one of --config or --demo is required\n" << app.help();
    return 2;
  }

  try {
    vf::VerificationConfig cfg = demo.empty() ? vf::load_config(config_path) : vf::demo_config(demo);
    if (*grid_opt) cfg.grid = grid;
    if (*seed_opt) cfg.seed = seed;
    if (*tol_opt) cfg.tolerances.fd = tol;
    if (!checks.empty()) cfg.checks = vf::parse_check_list(checks);

    // Invalid tori or data abort here, before any check runs.
    vf::build_datum(cfg);

    const auto report = vf::run_suite(cfg);
    vf::emit_report(report, vf::resolve_output_path(cfg, out), std::cout);
    return report.overall ? 0 : 1;
  } catch (const cplxtorsor::Error& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return 2;
  }
}
