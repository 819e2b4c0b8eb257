// chgevrey: simulate the weakly dissipative Camassa-Holm equation and check
// its Gevrey regularity estimates.
//
//   chgevrey <simulate|verify|lifespan|radius|continuity|picard> --config path
//            [--seed N] [--out DIR] [--update-pins]
//
// Exit status: 0 success, 1 a checked property failed, 2 bad input.

#include <iostream>

#include "CLI11.hpp"

#include "chg/errors.hpp"
#include "chg/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gevrey regularity toolkit for the weakly dissipative Camassa-Holm equation"};
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool update_pins = false;

  app.add_option("subcommand", subcommand, "simulate, verify, lifespan, radius, continuity or picard")
      ->required()
      ->check(CLI::IsMember({"simulate", "verify", "lifespan", "radius", "continuity", "picard"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* seed_opt = app.add_option("--seed", seed, "ensemble seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_flag("--update-pins", update_pins, "rewrite the pinned constants file (verify only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    chg::RunConfig cfg = chg::parse_config(config_path);
    cfg.subcommand = chg::parse_subcommand(subcommand);
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.output_dir = out_dir;
    cfg.update_pins = update_pins;
    return chg::run(cfg, std::cout);
  } catch (const chg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
