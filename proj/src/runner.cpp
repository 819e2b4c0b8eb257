#include "chg/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "chg/errors.hpp"
#include "chg/verifier.hpp"

#ifndef CHG_VERSION
#define CHG_VERSION "0.0.0"
#endif

namespace chg {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Typed access to one JSON object; remembers which keys were consumed so
// the rest can be reported as unknown.
class Section {
 public:
  Section(const json& obj, std::string prefix, std::vector<std::string>& warnings)
      : obj_(obj), prefix_(std::move(prefix)), warnings_(warnings) {
    if (!obj_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  ~Section() {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) warnings_.push_back("unknown key '" + path(item.key()) + "' ignored");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(path(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) throw ConfigError(path(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  /// Child object, or nullptr when absent.
  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
  std::vector<std::string>& warnings() { return warnings_; }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& warnings_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

json to_json(const RunConfig& c) {
  return {
      {"subcommand", std::string(subcommand_name(c.subcommand))},
      {"model",
       {{"alpha", c.model.alpha},
        {"beta", c.model.beta},
        {"gamma", c.model.gamma},
        {"Gamma", c.model.Gamma},
        {"lambda", c.model.lambda},
        {"epsilon", c.model.epsilon}}},
      {"grid", {{"n_points", c.grid.n_points()}, {"period", c.grid.period()}}},
      {"solver",
       {{"dt", c.solver.dt},
        {"t_end", c.solver.t_end},
        {"record_every", c.solver.record_every},
        {"dealias", c.solver.dealias},
        {"s_monitor", c.solver.s_monitor}}},
      {"gevrey", {{"sigma", c.gevrey.sigma}, {"delta", c.gevrey.delta}, {"s", c.gevrey.s}}},
      {"initial_data",
       {{"name", c.initial_data.name},
        {"amplitude", c.initial_data.amplitude},
        {"wavenumber", c.initial_data.wavenumber},
        {"width", c.initial_data.width},
        {"decay", c.initial_data.decay},
        {"path", c.initial_data.path}}},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
      {"C_prime", c.C_prime},
      {"radius",
       {{"delta0", c.radius.delta0},
        {"C_cal", c.radius.C_cal},
        {"calibrate", c.radius.calibrate},
        {"calibrate_until", c.radius.calibrate_until}}},
      {"picard",
       {{"iterations", c.picard.iterations},
        {"horizon_fraction", c.picard.horizon_fraction},
        {"quadrature_nodes", c.picard.quadrature_nodes},
        {"ratio_limit", c.picard.ratio_limit}}},
      {"continuity",
       {{"count", c.continuity.count},
        {"perturbation_wavenumber", c.continuity.perturbation_wavenumber},
        {"budget", c.continuity.budget},
        {"steps", c.continuity.steps}}},
      {"verify",
       {{"ensemble_size", c.verify.ensemble_size},
        {"symbol_grid_points", c.verify.symbol_grid_points},
        {"pins_path", c.verify.pins_path},
        {"ea_a", c.verify.ea_a},
        {"ea_deltas", c.verify.ea_deltas}}},
      {"update_pins", c.update_pins},
  };
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Outputs {
 public:
  explicit Outputs(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.output_dir) {
    fs::create_directories(dir_);
    meta_ = {{"version", CHG_VERSION},
             {"config", to_json(cfg)},
             {"warnings", cfg.warnings},
             {"started_at", utc_now()},
             {"status", "running"}};
    if (auto pins = load_pins(cfg.verify.pins_path)) {
      meta_["pinned_constants"] = {{"C_s_algebra", pins->C_s_algebra},
                                   {"C_bar_s", pins->C_bar_s},
                                   {"C_sym_lemma", pins->C_sym_lemma},
                                   {"C_commutator", pins->C_commutator},
                                   {"pinned_at", pins->pin_date_metadata}};
    } else {
      meta_["pinned_constants"] = nullptr;
    }
    write_metadata();
  }

  json& meta() { return meta_; }

  void finish(int exit_code) {
    meta_["status"] = exit_code == 0 ? "ok" : "violation";
    meta_["exit_code"] = exit_code;
    meta_["finished_at"] = utc_now();
    write_metadata();
  }

  void write_report(const json& report) const { write_json(dir_ / "report.json", report); }

  void write_trajectory(std::span<const RadiusRecord> records) const {
    std::ofstream out(dir_ / "trajectory.csv");
    if (!out) throw InputError("cannot write " + (dir_ / "trajectory.csv").string());
    out << kTrajectoryHeader << '\n' << std::setprecision(17);
    for (const RadiusRecord& r : records) {
      out << r.t << ',' << r.sobolev_s << ',' << r.gevrey_norm_at_delta_theory << ','
          << r.delta_fit << ',' << r.delta_theory << ',' << r.f_val << ',' << r.b_val << ','
          << r.H_val << '\n';
    }
  }

 private:
  static void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
  }
  void write_metadata() const { write_json(dir_ / "metadata.json", meta_); }

  const RunConfig& cfg_;
  fs::path dir_;
  json meta_;
};

json report_json(const VerificationReport& r) {
  json j = {{"kind", r.kind},
            {"cases", r.cases},
            {"violations", r.violations},
            {"skipped", r.skipped},
            {"worst_ratio", r.worst_ratio},
            {"tolerance", r.tolerance}};
  if (!r.metrics.empty()) j["metrics"] = r.metrics;
  return j;
}

void print_report(std::ostream& out, const VerificationReport& r) {
  out << std::left << std::setw(18) << r.suite << std::right << " kind=" << r.kind
      << " cases=" << r.cases << " violations=" << r.violations << " skipped=" << r.skipped
      << " worst_ratio=" << std::setprecision(6) << r.worst_ratio
      << (r.passed() ? "  ok" : "  FAILED") << '\n';
}

RadiusTrackingConfig tracking_config(const RunConfig& cfg) {
  return {cfg.gevrey.sigma, cfg.gevrey.s, cfg.radius.delta0, cfg.radius.C_cal};
}

struct SimulationOutcome {
  Trajectory traj;
  std::optional<double> blowup_time;
  std::string blowup_reason;
};

SimulationOutcome simulate_to_end(const SpectralField& u0, const RunConfig& cfg) {
  SimulationOutcome o;
  try {
    o.traj = integrate(u0, cfg.model, cfg.solver);
  } catch (const BlowUpError& e) {
    o.blowup_time = e.time();
    o.blowup_reason = e.what();
    if (e.partial()) o.traj = *e.partial();
  }
  return o;
}

double algebra_pin_or_one(const RunConfig& cfg) {
  const auto pins = load_pins(cfg.verify.pins_path);
  return pins ? pins->C_s_algebra : 1.0;
}

// ------------------------------------------------------------ subcommands

int run_simulate(const RunConfig& cfg, Outputs& io, std::ostream& out, bool check_radius) {
  const SpectralField u0 = make_initial_data(cfg.initial_data, cfg.grid);
  SimulationOutcome sim = simulate_to_end(u0, cfg);
  if (sim.blowup_time) {
    io.meta()["blowup_time"] = *sim.blowup_time;
    io.meta()["blowup_reason"] = sim.blowup_reason;
    out << "blow-up at t = " << *sim.blowup_time << '\n';
  }

  RadiusTrackingConfig tracking = tracking_config(cfg);
  json report = {{"subcommand", std::string(subcommand_name(cfg.subcommand))},
                 {"dt_within_stability_bound", sim.traj.dt_within_stability_bound},
                 {"blowup", sim.blowup_time.has_value()}};
  if (cfg.radius.calibrate && !sim.traj.states.empty()) {
    tracking.C_cal = calibrate_c_cal(sim.traj, cfg.model, tracking, algebra_pin_or_one(cfg),
                                     cfg.radius.calibrate_until);
  }
  report["C_cal"] = tracking.C_cal;

  std::vector<RadiusRecord> records;
  if (!sim.traj.states.empty()) records = track_radius(sim.traj, cfg.model, tracking);
  io.write_trajectory(records);

  int code = 0;
  for (const RadiusRecord& r : records) {
    if (r.delta_theory_clamped) {
      report["delta_theory_floor_from"] = r.t;
      break;
    }
  }
  if (!records.empty()) {
    const RadiusRecord& last = records.back();
    report["final"] = {{"t", last.t},
                       {"sobolev", last.sobolev_s},
                       {"delta_fit", last.delta_fit},
                       {"delta_theory", last.delta_theory},
                       {"H", last.H_val}};
    out << std::setprecision(10) << "t_final = " << last.t << "  sobolev = " << last.sobolev_s
        << "  delta_fit = " << last.delta_fit << "  delta_theory = " << last.delta_theory << '\n';
  }
  if (check_radius) {
    const MeasuredVsTheory mv = check_measured_vs_theory(records);
    report["measured_vs_theory"] = {{"records", mv.records},
                                    {"violations", mv.violations},
                                    {"worst_margin", mv.worst_margin},
                                    {"delta_positive", mv.delta_positive},
                                    {"delta_nonincreasing", mv.delta_nonincreasing},
                                    {"passed", mv.passed()}};
    out << "measured_vs_theory: " << (mv.passed() ? "ok" : "FAILED") << " (violations "
        << mv.violations << ", worst margin " << mv.worst_margin << ")\n";
    if (!records.empty()) {
      try {
        const RadiusEstimate est = estimate_radius(u0, cfg.gevrey.sigma);
        report["initial_fit"] = {{"delta_fit", est.delta_fit},
                                 {"residual", est.residual},
                                 {"modes", est.modes_count}};
      } catch (const InsufficientDecayError& e) {
        report["initial_fit"] = {{"error", e.what()}};
      }
    }
    if (!mv.passed()) code = 1;
  }
  io.write_report(report);
  return code;
}

int run_lifespan(const RunConfig& cfg, Outputs& io, std::ostream& out) {
  const SpectralField u0 = make_initial_data(cfg.initial_data, cfg.grid);
  const double norm = gevrey_norm(u0, {cfg.gevrey.sigma, 1.0, cfg.gevrey.s});
  const LifespanBounds b = lifespan_bounds(norm, cfg.gevrey.sigma, cfg.C_prime);
  out << std::setprecision(6) << std::scientific << "u0_norm = " << norm << '\n'
      << "L = " << b.L << '\n'
      << "M = " << b.M << '\n'
      << "R = " << b.R << '\n'
      << "D_sigma = " << b.D_sigma << '\n'
      << "T0_min_formula = " << b.T0_min_formula << '\n'
      << "T0_closed_form = " << b.T0_closed_form << '\n'
      << std::defaultfloat;
  io.write_report({{"subcommand", "lifespan"},
                   {"u0_norm", norm},
                   {"L", b.L},
                   {"M", b.M},
                   {"R", b.R},
                   {"D_sigma", b.D_sigma},
                   {"T0_min_formula", b.T0_min_formula},
                   {"T0_closed_form", b.T0_closed_form},
                   {"C_prime", b.C_prime}});
  return 0;
}

int run_picard(const RunConfig& cfg, Outputs& io, std::ostream& out) {
  const SpectralField u0 = make_initial_data(cfg.initial_data, cfg.grid);
  const double sigma = cfg.gevrey.sigma;
  const double norm = gevrey_norm(u0, {sigma, 1.0, cfg.gevrey.s});
  const double window =
      holomorphy_window(lifespan_bounds(norm, sigma, cfg.C_prime).T0_closed_form, 0.0, sigma);
  const double T = cfg.picard.horizon_fraction * window;
  PicardOptions opts;
  opts.quadrature_nodes = cfg.picard.quadrature_nodes;
  opts.C_prime = cfg.C_prime;
  opts.dealias = cfg.solver.dealias_mode();
  const PicardResult res =
      picard_iterate(u0, cfg.model, sigma, cfg.gevrey.s, T, cfg.picard.iterations, opts);

  const double worst = res.ratios.empty() ? 0.0 : *std::max_element(res.ratios.begin(), res.ratios.end());
  const bool ok = !res.diverged_at && worst <= cfg.picard.ratio_limit;
  out << std::setprecision(6) << "window = " << res.window << "  T = " << T << '\n';
  for (std::size_t n = 0; n < res.difference_norms.size(); ++n) {
    out << "||u_" << n + 1 << " - u_" << n << "||_E = " << res.difference_norms[n];
    if (n > 0) out << "  ratio = " << res.ratios[n - 1];
    out << '\n';
  }
  out << "contraction: " << (ok ? "ok" : "FAILED") << '\n';
  json report = {{"subcommand", "picard"},
                 {"window", res.window},
                 {"T", T},
                 {"difference_norms", res.difference_norms},
                 {"ratios", res.ratios},
                 {"worst_ratio", worst},
                 {"ratio_limit", cfg.picard.ratio_limit},
                 {"passed", ok}};
  if (res.diverged_at) report["diverged_at"] = *res.diverged_at;
  io.write_report(report);
  return ok ? 0 : 1;
}

int run_continuity(const RunConfig& cfg, Outputs& io, std::ostream& out) {
  const SpectralField limit = make_initial_data(cfg.initial_data, cfg.grid);
  std::vector<SpectralField> sequence;
  const int m = cfg.continuity.perturbation_wavenumber;
  for (int n = 1; n <= cfg.continuity.count; ++n) {
    InitialDataSpec bump;
    bump.amplitude = std::pow(10.0, -n);
    bump.wavenumber = m;
    sequence.push_back(limit + make_initial_data(bump, cfg.grid));
  }
  ContinuityOptions opts;
  opts.C_prime = cfg.C_prime;
  opts.budget = cfg.continuity.budget;
  opts.steps = cfg.continuity.steps;
  const ContinuityReport rep = continuity_experiment(sequence, limit, cfg.model, cfg.gevrey.sigma,
                                                     cfg.gevrey.s, cfg.solver, opts);
  out << std::setprecision(6) << "horizon = " << rep.horizon << '\n';
  for (std::size_t n = 0; n < rep.distances.size(); ++n) {
    out << "n = " << n + 1 << "  distance = " << rep.distances[n] << "  bound = " << rep.bounds[n]
        << (rep.within_bound[n] ? "" : "  EXCEEDED") << '\n';
  }
  out << "continuity: " << (rep.passed() ? "ok" : "FAILED") << '\n';
  std::vector<bool> within(rep.within_bound.begin(), rep.within_bound.end());
  io.write_report({{"subcommand", "continuity"},
                   {"horizon", rep.horizon},
                   {"distances", rep.distances},
                   {"bounds", rep.bounds},
                   {"within_bound", within},
                   {"strictly_decreasing", rep.strictly_decreasing},
                   {"decreasing_with_slack", rep.decreasing_with_slack},
                   {"passed", rep.passed()}});
  return rep.passed() ? 0 : 1;
}

int run_verify(const RunConfig& cfg, Outputs& io, std::ostream& out) {
  const auto stored = cfg.update_pins ? std::nullopt : load_pins(cfg.verify.pins_path);
  const int n = cfg.verify.ensemble_size;
  const std::uint64_t seed = cfg.seed;
  static constexpr double kSList[] = {1.0, 2.0};
  static constexpr double kLList[] = {1.0, 2.0 / 3.0, 0.5, 0.4};
  static constexpr double kSigmas[] = {1.0, 2.0};
  static const std::pair<double, double> kDeltaPairs[] = {{0.6, 0.5}, {1.0, 0.5}};

  auto algebra = std::async(std::launch::async, [&] {
    return verify_algebra(n, seed, kSList, stored ? std::optional(stored->C_s_algebra) : std::nullopt,
                          stored ? std::optional(stored->C_bar_s) : std::nullopt);
  });
  auto symbol = std::async(std::launch::async, [&] {
    return verify_symbol_lemma(cfg.verify.symbol_grid_points,
                               stored ? std::optional(stored->C_sym_lemma) : std::nullopt);
  });
  auto commutator = std::async(std::launch::async, [&] {
    return verify_commutator_estimate(n, seed,
                                      stored ? std::optional(stored->C_commutator) : std::nullopt);
  });
  auto trajectory = std::async(std::launch::async, [&] {
    return integrate(make_initial_data(cfg.initial_data, cfg.grid), cfg.model, cfg.solver);
  });

  std::vector<VerificationReport> reports;
  reports.push_back(verify_embedding(n, seed));
  reports.push_back(verify_norm_equivalence(n, seed));
  reports.push_back(verify_interpolation(n, seed, kLList));
  const DerivativeBoundResult deriv =
      verify_derivative_bound(verifier_grid(), kSigmas, kDeltaPairs, n, seed);
  reports.push_back(deriv.sharp);
  reports.push_back(deriv.helmholtz);

  const PinnedResult alg = algebra.get();
  const PinnedResult sym = symbol.get();
  const PinnedResult com = commutator.get();
  reports.push_back(alg.report);
  reports.push_back(sym.report);
  reports.push_back(com.report);

  const Trajectory traj = trajectory.get();
  reports.push_back(verify_H_monotone(traj, cfg.model, cfg.gevrey.s));
  reports.push_back(verify_ea_integral(traj.times, traj.states, cfg.verify.ea_a, cfg.gevrey.sigma,
                                       cfg.gevrey.s, cfg.verify.ea_deltas));

  json report = json::object();
  bool ok = true;
  for (const VerificationReport& r : reports) {
    print_report(out, r);
    report[r.suite] = report_json(r);
    ok = ok && r.passed();
  }
  json sharp_cases = json::array();
  for (const SharpConstantCase& c : deriv.cases) {
    sharp_cases.push_back({{"sigma", c.sigma},
                           {"delta", c.delta},
                           {"delta_prime", c.delta_prime},
                           {"sharp_G", c.sharp_G},
                           {"sharp_Gbar", c.sharp_Gbar},
                           {"bound", c.bound},
                           {"ratio_to_halved", c.ratio_to_halved}});
  }
  report["derivative_bound"]["cases"] = sharp_cases;

  if (cfg.update_pins) {
    EmpiricalConstants pins{alg.pins[0], alg.pins[1], sym.pins[0], com.pins[0], {}};
    save_pins(cfg.verify.pins_path, pins, seed);
    out << "pins written to " << cfg.verify.pins_path << '\n';
  } else if (!stored) {
    out << "no pins file at " << cfg.verify.pins_path << "; pinned suites checked against this run\n";
  }
  report["pins_source"] = cfg.update_pins ? "updated" : (stored ? "file" : "observed");
  io.write_report(report);
  return ok ? 0 : 1;
}

}  // namespace

Subcommand parse_subcommand(std::string_view name) {
  static constexpr std::pair<std::string_view, Subcommand> table[] = {
      {"simulate", Subcommand::simulate}, {"verify", Subcommand::verify},
      {"lifespan", Subcommand::lifespan}, {"radius", Subcommand::radius},
      {"continuity", Subcommand::continuity}, {"picard", Subcommand::picard},
  };
  for (const auto& [key, cmd] : table) {
    if (key == name) return cmd;
  }
  throw ConfigError("subcommand", "unknown subcommand '" + std::string(name) + "'");
}

std::string_view subcommand_name(Subcommand cmd) noexcept {
  switch (cmd) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::verify: return "verify";
    case Subcommand::lifespan: return "lifespan";
    case Subcommand::radius: return "radius";
    case Subcommand::continuity: return "continuity";
    case Subcommand::picard: return "picard";
  }
  return "simulate";
}

RunConfig parse_config_text(std::string_view text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }

  RunConfig c;
  {
    Section top(root, "", c.warnings);
    if (top.has("subcommand")) c.subcommand = parse_subcommand(top.text("subcommand", "simulate"));
    c.output_dir = resolve_path(top.text("output_dir", c.output_dir), base_dir);
    c.seed = top.unsigned_integer("seed", c.seed);
    c.C_prime = top.number("C_prime", c.C_prime);
    require(c.C_prime > 0.0, "C_prime", "must be positive");

    if (const json* m = top.child("model")) {
      Section s(*m, "model", c.warnings);
      c.model.alpha = s.number("alpha", c.model.alpha);
      c.model.beta = s.number("beta", c.model.beta);
      c.model.gamma = s.number("gamma", c.model.gamma);
      c.model.Gamma = s.number("Gamma", c.model.Gamma);
      c.model.lambda = s.number("lambda", c.model.lambda);
      c.model.epsilon = s.number("epsilon", c.model.epsilon);
    }
    require(c.model.lambda > 0.0, "model.lambda", "lambda must be a positive number");
    require(c.model.epsilon > 0.0, "model.epsilon", "epsilon must be positive");

    if (const json* g = top.child("grid")) {
      Section s(*g, "grid", c.warnings);
      const int n = s.integer("n_points", 256);
      const double period = s.number("period", kTwoPi);
      require(n >= 8 && n % 2 == 0, "grid.n_points", "must be even and at least 8");
      require(period > 0.0, "grid.period", "must be positive");
      c.grid = TorusGrid(n, period);
    }

    if (const json* v = top.child("solver")) {
      Section s(*v, "solver", c.warnings);
      c.solver.dt = s.number("dt", c.solver.dt);
      c.solver.t_end = s.number("t_end", c.solver.t_end);
      c.solver.record_every = s.integer("record_every", c.solver.record_every);
      c.solver.dealias = s.boolean("dealias", c.solver.dealias);
      c.solver.s_monitor = s.number("s_monitor", c.solver.s_monitor);
    }
    require(c.solver.dt > 0.0, "solver.dt", "must be positive");
    require(c.solver.t_end >= 0.0, "solver.t_end", "must be nonnegative");
    require(c.solver.record_every >= 1, "solver.record_every", "must be at least 1");

    if (const json* g = top.child("gevrey")) {
      Section s(*g, "gevrey", c.warnings);
      c.gevrey.sigma = s.number("sigma", c.gevrey.sigma);
      c.gevrey.delta = s.number("delta", c.gevrey.delta);
      c.gevrey.s = s.number("s", c.gevrey.s);
    }
    require(c.gevrey.sigma >= 1.0, "gevrey.sigma", "Gevrey index sigma must be >= 1");
    require(c.gevrey.delta >= 0.0, "gevrey.delta", "must be nonnegative");

    if (const json* d = top.child("initial_data")) {
      Section s(*d, "initial_data", c.warnings);
      InitialDataSpec& spec = c.initial_data;
      spec.name = s.text("name", spec.name);
      spec.amplitude = s.number("amplitude", spec.amplitude);
      spec.wavenumber = s.integer("wavenumber", spec.wavenumber);
      spec.width = s.number("width", spec.width);
      spec.decay = s.number("decay", spec.decay);
      spec.path = resolve_path(s.text("path", spec.path), base_dir);
    } else {
      throw ConfigError("initial_data", "missing");
    }

    if (const json* r = top.child("radius")) {
      Section s(*r, "radius", c.warnings);
      c.radius.delta0 = s.number("delta0", c.radius.delta0);
      c.radius.C_cal = s.number("C_cal", c.radius.C_cal);
      c.radius.calibrate = s.boolean("calibrate", c.radius.calibrate);
      c.radius.calibrate_until = s.number("calibrate_until", c.radius.calibrate_until);
    }
    require(c.radius.delta0 > 0.0 && c.radius.delta0 < 1.0, "radius.delta0", "must lie in (0, 1)");
    require(c.radius.C_cal > 0.0, "radius.C_cal", "must be positive");

    if (const json* p = top.child("picard")) {
      Section s(*p, "picard", c.warnings);
      c.picard.iterations = s.integer("iterations", c.picard.iterations);
      c.picard.horizon_fraction = s.number("horizon_fraction", c.picard.horizon_fraction);
      c.picard.quadrature_nodes = s.integer("quadrature_nodes", c.picard.quadrature_nodes);
      c.picard.ratio_limit = s.number("ratio_limit", c.picard.ratio_limit);
    }
    require(c.picard.iterations >= 1, "picard.iterations", "must be at least 1");
    require(c.picard.horizon_fraction > 0.0 && c.picard.horizon_fraction < 1.0,
            "picard.horizon_fraction", "must lie in (0, 1)");
    require(c.picard.quadrature_nodes >= 2, "picard.quadrature_nodes", "must be at least 2");

    if (const json* p = top.child("continuity")) {
      Section s(*p, "continuity", c.warnings);
      c.continuity.count = s.integer("count", c.continuity.count);
      c.continuity.perturbation_wavenumber =
          s.integer("perturbation_wavenumber", c.continuity.perturbation_wavenumber);
      c.continuity.budget = s.number("budget", c.continuity.budget);
      c.continuity.steps = s.integer("steps", c.continuity.steps);
    }
    require(c.continuity.count >= 2, "continuity.count", "must be at least 2");
    require(c.continuity.steps >= 1, "continuity.steps", "must be at least 1");

    if (const json* p = top.child("verify")) {
      Section s(*p, "verify", c.warnings);
      c.verify.ensemble_size = s.integer("ensemble_size", c.verify.ensemble_size);
      c.verify.symbol_grid_points = s.integer("symbol_grid_points", c.verify.symbol_grid_points);
      c.verify.pins_path = resolve_path(s.text("pins_path", c.verify.pins_path), base_dir);
      c.verify.ea_a = s.number("ea_a", c.verify.ea_a);
      c.verify.ea_deltas = s.numbers("ea_deltas", c.verify.ea_deltas);
    }
    require(c.verify.ensemble_size >= 1, "verify.ensemble_size", "must be at least 1");
    require(c.verify.symbol_grid_points >= 2, "verify.symbol_grid_points", "must be at least 2");
    require(c.verify.ea_a > 0.0, "verify.ea_a", "must be positive");
  }

  // Generator settings are validated by building the datum once.
  make_initial_data(c.initial_data, c.grid);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string dir = fs::path(path).parent_path().string();
  return parse_config_text(buf.str(), dir.empty() ? "." : dir);
}

SpectralField make_initial_data(const InitialDataSpec& spec, const TorusGrid& grid) {
  require(std::isfinite(spec.amplitude), "initial_data.amplitude", "must be finite");
  SpectralField u(grid);
  const double a = spec.amplitude;

  if (spec.name == "cosine") {
    const int m = std::abs(spec.wavenumber);
    require(m <= grid.max_mode(), "initial_data.wavenumber", "outside the grid band");
    if (m == 0) {
      u.set_mode(0, a);
    } else {
      u.set_mode(m, m == grid.max_mode() ? a : 0.5 * a);
    }
  } else if (spec.name == "constant") {
    u.set_mode(0, a);
  } else if (spec.name == "gaussian_bump") {
    require(spec.width > 0.0, "initial_data.width", "must be positive");
    const double L = grid.period();
    std::vector<double> samples;
    for (double x : grid.points()) {
      double v = 0.0;
      for (int j = -4; j <= 4; ++j) {
        const double y = x - 0.5 * L - j * L;
        v += std::exp(-y * y / (2.0 * spec.width * spec.width));
      }
      samples.push_back(a * v);
    }
    u = to_spectral(samples, grid);
  } else if (spec.name == "exp_decay_modes") {
    require(spec.decay > 0.0, "initial_data.decay", "must be positive");
    for (int m = 0; m <= grid.max_mode(); ++m) {
      u.set_mode(m, a * std::exp(-spec.decay * std::abs(grid.wavenumber(m))));
    }
  } else if (spec.name == "coeff_file") {
    require(!spec.path.empty(), "initial_data.path", "required for coeff_file");
    std::ifstream in(spec.path);
    require(static_cast<bool>(in), "initial_data.path", "cannot read " + spec.path);
    std::string line;
    int m = 0;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream ls(line);
      double re = 0.0, im = 0.0;
      if (!(ls >> re >> im)) {
        throw ConfigError("initial_data.path",
                          spec.path + ":" + std::to_string(line_no) + ": expected 're im'");
      }
      require(m <= grid.max_mode(), "initial_data.path", "more coefficients than grid modes");
      require(m != 0 || im == 0.0, "initial_data.path", "mode 0 must be real");
      u.set_mode(m, Complex{re, im});
      ++m;
    }
  } else {
    throw ConfigError("initial_data.name", "unknown generator '" + spec.name + "'");
  }
  return u;
}

int run(const RunConfig& cfg, std::ostream& out) {
  Outputs io(cfg);
  for (const std::string& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  int code = 0;
  switch (cfg.subcommand) {
    case Subcommand::simulate: code = run_simulate(cfg, io, out, false); break;
    case Subcommand::radius: code = run_simulate(cfg, io, out, true); break;
    case Subcommand::lifespan: code = run_lifespan(cfg, io, out); break;
    case Subcommand::picard: code = run_picard(cfg, io, out); break;
    case Subcommand::continuity: code = run_continuity(cfg, io, out); break;
    case Subcommand::verify: code = run_verify(cfg, io, out); break;
  }
  io.finish(code);
  return code;
}

}  // namespace chg
