#pragma once

// Configuration ingestion and subcommand dispatch for the chgevrey tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chg/analyticity.hpp"
#include "chg/integrator.hpp"
#include "chg/model.hpp"
#include "chg/spectral.hpp"

#ifndef CHG_DEFAULT_PINS_PATH
#define CHG_DEFAULT_PINS_PATH "data/pinned_constants.json"
#endif

namespace chg {

inline constexpr const char* kTrajectoryHeader = "t,sobolev,gevrey,delta_fit,delta_theory,f,b,H";

enum class Subcommand { simulate, verify, lifespan, radius, continuity, picard };

Subcommand parse_subcommand(std::string_view name);
std::string_view subcommand_name(Subcommand cmd) noexcept;

struct InitialDataSpec {
  std::string name = "cosine";  ///< cosine, constant, gaussian_bump, exp_decay_modes, coeff_file
  double amplitude = 1.0;
  int wavenumber = 1;  ///< cosine
  double width = 0.5;  ///< gaussian_bump standard deviation
  double decay = 0.8;  ///< exp_decay_modes: coefficients amplitude * e^{-decay |k|}
  std::string path;    ///< coeff_file, resolved against the config directory
};

struct RadiusSettings {
  double delta0 = 0.5;
  double C_cal = 1.0;
  bool calibrate = false;  ///< replace C_cal by calibrate_c_cal on the run itself
  double calibrate_until = 1.0;
};

struct PicardSettings {
  int iterations = 8;
  double horizon_fraction = 0.5;  ///< T as a fraction of the holomorphy window
  int quadrature_nodes = 512;
  double ratio_limit = 0.75;
};

struct ContinuitySettings {
  int count = 4;                  ///< perturbations 10^{-n} cos(m x), n = 1..count
  int perturbation_wavenumber = 2;
  double budget = 1e-6;
  int steps = 128;
};

struct VerifySettings {
  int ensemble_size = 200;
  int symbol_grid_points = 129;
  std::string pins_path = CHG_DEFAULT_PINS_PATH;
  double ea_a = 1.0;
  std::vector<double> ea_deltas{0.25, 0.5};
};

struct RunConfig {
  Subcommand subcommand = Subcommand::simulate;
  ModelParams model;
  TorusGrid grid;
  SolverConfig solver;
  GevreyIndex gevrey{1.0, 0.5, 2.0};
  InitialDataSpec initial_data;
  std::string output_dir = "out";
  std::uint64_t seed = 42;
  double C_prime = 1.0;
  RadiusSettings radius;
  PicardSettings picard;
  ContinuitySettings continuity;
  VerifySettings verify;
  bool update_pins = false;

  std::string source_json;            ///< resolved config, written to metadata.json
  std::vector<std::string> warnings;  ///< unknown keys
};

/// Parses and validates a JSON config. Throws ConfigError naming the field.
RunConfig parse_config_text(std::string_view text, const std::string& base_dir = ".");
RunConfig parse_config(const std::string& path);

/// Builds u0 on cfg.grid. Throws ConfigError on bad generator settings.
SpectralField make_initial_data(const InitialDataSpec& spec, const TorusGrid& grid);

/// Runs the subcommand and writes metadata.json, report.json and (for
/// time-dependent runs) trajectory.csv into cfg.output_dir.
/// Returns 0 on success and 1 when a checked property fails.
int run(const RunConfig& cfg, std::ostream& out);

}  // namespace chg
