#include "chg/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "chg/analyticity.hpp"
#include "chg/errors.hpp"

namespace chg {

namespace {

using json = nlohmann::json;

bool exceeds(double lhs, double rhs) { return lhs > rhs * (1.0 + kExactSlack); }

double ratio_of(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

void record(VerificationReport& r, double lhs, double rhs) {
  ++r.cases;
  r.worst_ratio = std::max(r.worst_ratio, ratio_of(lhs, rhs));
  if (exceeds(lhs, rhs)) ++r.violations;
}

VerificationReport exact_report(std::string suite) {
  VerificationReport r;
  r.suite = std::move(suite);
  r.kind = "exact";
  r.tolerance = kExactSlack;
  return r;
}

double log1pk2(double k) { return std::log1p(k * k); }

/// (1 + x^2)^{1/(2 sigma)}
double rho(double x, double sigma) { return std::exp(log1pk2(x) / (2.0 * sigma)); }

// sum_m W_m a_m conj(b_m), W = (1+k^2)^s e^{2 delta rho(k)} the squared norm weight.
Complex weighted_inner(const SpectralField& a, const SpectralField& b, const GevreyIndex& idx) {
  const TorusGrid& grid = a.grid();
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < ca.size(); ++j) {
    if (ca[j] == Complex{} || cb[j] == Complex{}) continue;
    const double k = grid.wavenumber(grid.mode_at(j));
    const double w = std::exp(detail::log_gevrey_weight(k, idx));
    acc += w * ca[j] * std::conj(cb[j]);
  }
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag())) {
    throw OverflowError("weighted inner product overflows");
  }
  return acc;
}

RatioSides bracket_sides(double lhs, const SpectralField& u, const SpectralField& v,
                         const GevreyIndex& idx) {
  const double s = idx.s;
  const double s1 = s + 1.0 / idx.sigma;
  const GevreyIndex e_s{idx.sigma, idx.delta, s};
  const GevreyIndex e_s1{idx.sigma, idx.delta, s1};
  const double v_s1 = gevrey_norm(v, e_s1);
  double rhs = sobolev_norm(u, s) * std::pow(sobolev_norm(v, s), 2);
  if (idx.delta > 0.0) {
    rhs += idx.delta * (gevrey_norm(u, e_s) * v_s1 * v_s1 +
                        gevrey_norm(u, e_s1) * v_s1 * gevrey_norm(v, e_s));
  }
  return {lhs, rhs};
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Worst ratio so far, the pin it is checked against and the violation count.
struct PinTracker {
  double observed = 0.0;
  std::vector<double> ratios;

  void add(double r) {
    observed = std::max(observed, r);
    ratios.push_back(r);
  }
  int violations(double pin) const {
    return static_cast<int>(std::count_if(ratios.begin(), ratios.end(),
                                          [pin](double r) { return r > pin; }));
  }
};

double resolve_pin(const PinTracker& t, std::optional<double> pin) {
  return pin ? *pin : kPinSafetyFactor * t.observed;
}

}  // namespace

std::optional<EmpiricalConstants> load_pins(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("cannot parse pins file " + path + ": " + e.what());
  }
  EmpiricalConstants c;
  try {
    const json& pins = j.at("pins");
    c.C_s_algebra = pins.at("C_s_algebra").get<double>();
    c.C_bar_s = pins.at("C_bar_s").get<double>();
    c.C_sym_lemma = pins.at("C_sym_lemma").get<double>();
    c.C_commutator = pins.at("C_commutator").get<double>();
    c.pin_date_metadata = j.value("pinned_at", std::string{});
  } catch (const json::exception& e) {
    throw InputError("malformed pins file " + path + ": " + e.what());
  }
  for (double v : {c.C_s_algebra, c.C_bar_s, c.C_sym_lemma, c.C_commutator}) {
    if (!std::isfinite(v) || v <= 0.0) throw InputError("pins file " + path + " holds a non-positive pin");
  }
  return c;
}

void save_pins(const std::string& path, const EmpiricalConstants& pins, std::uint64_t seed) {
  json j;
  j["format"] = 1;
  j["seed"] = seed;
  j["safety_factor"] = kPinSafetyFactor;
  j["pinned_at"] = pins.pin_date_metadata.empty() ? utc_now() : pins.pin_date_metadata;
  j["pins"] = {{"C_s_algebra", pins.C_s_algebra},
               {"C_bar_s", pins.C_bar_s},
               {"C_sym_lemma", pins.C_sym_lemma},
               {"C_commutator", pins.C_commutator}};
  std::ofstream out(path);
  if (!out) throw InputError("cannot write pins file " + path);
  out << std::setprecision(17) << j.dump(2) << '\n';
}

TorusGrid verifier_grid() { return TorusGrid(64); }

SpectralField random_band_limited(const TorusGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(grid);
  const int band = grid.n_points() / 4;
  for (int m = 0; m <= band; ++m) {
    const double decay = 1.0 / std::pow(std::max(1, m), 2);
    const double re = gauss(rng);
    const double im = gauss(rng);
    f.set_mode(m, decay * Complex{re, m == 0 ? 0.0 : im});
  }
  return f;
}

VerificationReport verify_embedding(int ensemble_size, std::uint64_t seed) {
  struct Triple {
    double sigma, sigma_p, delta, delta_p, s, s_p;
  };
  static constexpr Triple triples[] = {
      {2.0, 1.0, 0.5, 0.25, 2.0, 1.0},  {3.0, 1.5, 1.0, 0.5, 1.0, 0.0},
      {1.5, 1.0, 0.25, 0.1, 0.5, -0.5}, {2.0, 1.2, 0.8, 0.4, 3.0, 2.0},
      {1.2, 1.0, 0.1, 0.05, 1.5, 1.0},
  };
  VerificationReport r = exact_report("embedding");
  std::mt19937_64 rng(seed);
  const TorusGrid grid = verifier_grid();
  for (int i = 0; i < ensemble_size; ++i) {
    const SpectralField f = random_band_limited(grid, rng);
    for (const Triple& t : triples) {
      const double base = gevrey_norm(f, {t.sigma, t.delta, t.s});
      record(r, gevrey_norm(f, {t.sigma, t.delta_p, t.s}), base);
      record(r, base, gevrey_norm(f, {t.sigma_p, t.delta, t.s}));
      record(r, gevrey_norm(f, {t.sigma, t.delta, t.s_p}), base);
    }
  }
  return r;
}

DerivativeBoundResult verify_derivative_bound(const TorusGrid& grid,
                                              std::span<const double> sigma_list,
                                              std::span<const std::pair<double, double>> delta_pairs,
                                              int ensemble_size, std::uint64_t seed) {
  DerivativeBoundResult out;
  out.sharp.suite = "derivative_bound";
  out.sharp.kind = "sharp";
  out.sharp.tolerance = kExactSlack;
  out.helmholtz = exact_report("helmholtz_bounds");

  for (double sigma : sigma_list) {
    if (sigma < 1.0) throw InputError("derivative bound needs sigma >= 1");
    for (const auto& [delta, delta_p] : delta_pairs) {
      if (!(delta_p < delta) || delta_p < 0.0) {
        throw InputError("derivative bound needs 0 <= delta' < delta");
      }
      const double d = delta - delta_p;
      SharpConstantCase c{sigma, delta, delta_p};
      for (int m = 1; m <= grid.max_mode(); ++m) {
        const double k = std::abs(grid.wavenumber(m));
        c.sharp_G = std::max(c.sharp_G, k * std::exp(-d * rho(k, sigma)));
        c.sharp_Gbar = std::max(c.sharp_Gbar, k * std::exp(-d * std::pow(k, 1.0 / sigma)));
      }
      c.bound = std::exp(-sigma) * std::pow(sigma, sigma) / std::pow(d, sigma);
      c.ratio_to_halved = c.sharp_G / (0.5 * c.bound);
      record(out.sharp, c.sharp_G, c.bound);
      record(out.sharp, c.sharp_Gbar, c.bound);
      out.cases.push_back(c);
    }
  }

  // Per-mode symbols of (1 - d_xx)^{-1} and (1 - d_xx)^{-1} d_x against the
  // weight shift they are claimed to absorb.
  for (int m = grid.min_mode(); m <= grid.max_mode(); ++m) {
    const double k = grid.wavenumber(m);
    const double q = 1.0 + k * k;
    record(out.helmholtz, (1.0 / q) * std::sqrt(q), 1.0 / std::sqrt(q));
    record(out.helmholtz, std::abs(k) / q, 1.0 / std::sqrt(q));
  }

  std::mt19937_64 rng(seed);
  const TorusGrid egrid = verifier_grid();
  static constexpr double s_values[] = {0.0, 1.0, 2.5};
  for (int i = 0; i < ensemble_size; ++i) {
    const SpectralField f = random_band_limited(egrid, rng);
    const SpectralField lf = helmholtz_inv(f);
    const SpectralField ldf = derivative(lf);
    for (double sigma : sigma_list) {
      for (const auto& pair : delta_pairs) {
        const double delta = pair.first;
        for (double s : s_values) {
          record(out.helmholtz, gevrey_norm(lf, {sigma, delta, s}),
                 gevrey_norm(f, {sigma, delta, s - 2.0}));
          record(out.helmholtz, gevrey_norm(ldf, {sigma, delta, s}),
                 gevrey_norm(f, {sigma, delta, s - 1.0}));
        }
      }
    }
  }
  return out;
}

PinnedResult verify_algebra(int ensemble_size, std::uint64_t seed, std::span<const double> s_list,
                            std::optional<double> pin_C_s, std::optional<double> pin_C_bar) {
  for (double s : s_list) {
    if (!(s > 0.5)) throw InputError("algebra property needs s > 1/2");
  }
  static constexpr double deltas[] = {0.0, 0.5, 1.0};
  static constexpr double sigmas[] = {1.0, 2.0};

  PinTracker cs, cbar;
  std::mt19937_64 rng(seed);
  const TorusGrid grid = verifier_grid();
  for (int i = 0; i < ensemble_size; ++i) {
    const SpectralField f = random_band_limited(grid, rng);
    const SpectralField g = random_band_limited(grid, rng);
    const SpectralField fg = product(f, g);
    for (double s : s_list) {
      for (double sigma : sigmas) {
        for (double delta : deltas) {
          const GevreyIndex at_s{sigma, delta, s};
          const GevreyIndex below{sigma, delta, s - 1.0};
          cs.add(ratio_of(gevrey_norm(fg, at_s), gevrey_norm(f, at_s) * gevrey_norm(g, at_s)));
          cbar.add(ratio_of(gevrey_norm(fg, below), gevrey_norm(f, at_s) * gevrey_norm(g, below)));
        }
      }
    }
  }

  PinnedResult res;
  res.report.suite = "algebra";
  res.report.kind = "pinned";
  res.observed = {cs.observed, cbar.observed};
  res.pins = {resolve_pin(cs, pin_C_s), resolve_pin(cbar, pin_C_bar)};
  res.report.cases = static_cast<int>(cs.ratios.size() + cbar.ratios.size());
  res.report.violations = cs.violations(res.pins[0]) + cbar.violations(res.pins[1]);
  res.report.worst_ratio = std::max(cs.observed, cbar.observed);
  res.report.metrics = {{"C_s_observed", cs.observed},
                        {"C_bar_s_observed", cbar.observed},
                        {"C_s_pin", res.pins[0]},
                        {"C_bar_s_pin", res.pins[1]}};
  return res;
}

VerificationReport verify_norm_equivalence(int ensemble_size, std::uint64_t seed) {
  static constexpr double deltas[] = {0.1, 0.5, 1.0, 2.0};
  static constexpr double sigmas[] = {1.0, 1.5, 3.0};
  static constexpr double s_values[] = {0.0, 1.5};
  VerificationReport r = exact_report("norm_equivalence");
  std::mt19937_64 rng(seed);
  const TorusGrid grid = verifier_grid();
  for (int i = 0; i < ensemble_size; ++i) {
    const SpectralField f = random_band_limited(grid, rng);
    for (double delta : deltas) {
      for (double sigma : sigmas) {
        for (double s : s_values) {
          const GevreyIndex idx{sigma, delta, s};
          const double g = gevrey_norm(f, idx);
          const double gbar = gevrey_norm_bar(f, idx);
          record(r, gbar, g);
          record(r, g, std::exp(delta) * gbar);
        }
      }
    }
  }
  return r;
}

RatioSides symbol_lemma_sides(double xi, double eta, double delta, double sigma, double s) {
  auto symbol = [&](double x) {
    return std::exp(0.5 * s * log1pk2(x) + delta * rho(x, sigma));
  };
  const double lhs = std::abs(symbol(xi) - symbol(eta));
  const double gap = std::abs(xi - eta);
  const double h = 0.5 * (s - 1.0);
  const double extra = 1.0 / (2.0 * sigma);
  double bracket = std::exp(h * log1pk2(gap)) + std::exp(h * log1pk2(eta));
  if (delta > 0.0) {
    bracket += delta *
               (std::exp((h + extra) * log1pk2(gap)) + std::exp((h + extra) * log1pk2(eta))) *
               std::exp(delta * rho(gap, sigma));
  }
  return {lhs, gap * bracket};
}

PinnedResult verify_symbol_lemma(int points_per_axis, std::optional<double> pin) {
  if (points_per_axis < 2) throw InputError("symbol lemma grid needs at least 2 points per axis");
  static constexpr double deltas[] = {0.0, 0.1, 0.5};
  static constexpr double sigmas[] = {1.0, 2.0};
  static constexpr double s_values[] = {1.5, 2.5};
  std::vector<double> axis(points_per_axis);
  for (int i = 0; i < points_per_axis; ++i) {
    axis[i] = -64.0 + 128.0 * i / (points_per_axis - 1);
  }

  PinTracker t;
  for (double delta : deltas) {
    for (double sigma : sigmas) {
      for (double s : s_values) {
        for (double xi : axis) {
          for (double eta : axis) {
            const RatioSides sides = symbol_lemma_sides(xi, eta, delta, sigma, s);
            t.add(ratio_of(sides.lhs, sides.rhs));
          }
        }
      }
    }
  }
  PinnedResult res;
  res.report.suite = "symbol_lemma";
  res.report.kind = "pinned";
  res.observed = {t.observed};
  res.pins = {resolve_pin(t, pin)};
  res.report.cases = static_cast<int>(t.ratios.size());
  res.report.violations = t.violations(res.pins[0]);
  res.report.worst_ratio = t.observed;
  res.report.metrics = {{"C_sym_lemma_observed", t.observed}, {"C_sym_lemma_pin", res.pins[0]}};
  return res;
}

RatioSides commutator_sides(const SpectralField& u, const SpectralField& v, const GevreyIndex& idx) {
  const SpectralField uv = product(u, v);
  return bracket_sides(std::abs(weighted_inner(uv, v, idx)), u, v, idx);
}

RatioSides commutator_sides_transport(const SpectralField& u, const GevreyIndex& idx) {
  const SpectralField uux = product(u, derivative(u));
  return bracket_sides(std::abs(weighted_inner(uux, u, idx)), u, u, idx);
}

PinnedResult verify_commutator_estimate(int ensemble_size, std::uint64_t seed,
                                        std::optional<double> pin) {
  static constexpr double deltas[] = {0.0, 0.25, 0.5};
  static constexpr double sigmas[] = {1.0, 2.0};
  static constexpr double s_values[] = {2.0, 3.0};
  PinTracker t;
  int skipped = 0;
  std::mt19937_64 rng(seed);
  const TorusGrid grid = verifier_grid();
  for (int i = 0; i < ensemble_size; ++i) {
    const SpectralField u = random_band_limited(grid, rng);
    const SpectralField v = random_band_limited(grid, rng);
    for (double delta : deltas) {
      for (double sigma : sigmas) {
        for (double s : s_values) {
          const GevreyIndex idx{sigma, delta, s};
          for (int form = 0; form < 2; ++form) {
            try {
              const RatioSides sides =
                  form == 0 ? commutator_sides(u, v, idx) : commutator_sides_transport(u, idx);
              if (!(sides.rhs > 0.0)) {
                ++skipped;
                continue;
              }
              t.add(sides.lhs / sides.rhs);
            } catch (const OverflowError&) {
              ++skipped;
            }
          }
        }
      }
    }
  }
  PinnedResult res;
  res.report.suite = "commutator";
  res.report.kind = "pinned";
  res.observed = {t.observed};
  res.pins = {resolve_pin(t, pin)};
  res.report.cases = static_cast<int>(t.ratios.size());
  res.report.skipped = skipped;
  res.report.violations = t.violations(res.pins[0]);
  res.report.worst_ratio = t.observed;
  res.report.metrics = {{"C_commutator_observed", t.observed}, {"C_commutator_pin", res.pins[0]}};
  return res;
}

VerificationReport verify_interpolation(int ensemble_size, std::uint64_t seed,
                                        std::span<const double> l_list) {
  static constexpr double deltas[] = {0.1, 0.5, 1.0};
  static constexpr double sigmas[] = {1.0, 2.0};
  static constexpr double s_values[] = {0.0, 2.0};
  for (double l : l_list) {
    if (!(l > 0.0)) throw InputError("interpolation needs l > 0");
  }
  VerificationReport r = exact_report("interpolation");
  const double sqrt_e = std::sqrt(std::numbers::e);
  std::mt19937_64 rng(seed);
  const TorusGrid grid = verifier_grid();
  for (int i = 0; i < ensemble_size; ++i) {
    const SpectralField u = random_band_limited(grid, rng);
    for (double s : s_values) {
      const double hs = sobolev_norm(u, s);
      for (double delta : deltas) {
        for (double sigma : sigmas) {
          const double lhs = gevrey_norm(u, {sigma, delta, s});
          for (double l : l_list) {
            const double rhs = sqrt_e * hs + std::pow(2.0 * delta, 0.5 * l) *
                                                 gevrey_norm(u, {sigma, delta, s + l / (2.0 * sigma)});
            record(r, lhs, rhs);
          }
        }
      }
    }
  }
  return r;
}

VerificationReport verify_ea_integral(std::span<const double> times,
                                      std::span<const SpectralField> states, double a,
                                      double sigma, double s, std::span<const double> delta_list) {
  if (times.size() != states.size() || times.empty()) {
    throw InputError("ea integral needs matching, non-empty times and states");
  }
  const double ea = ea_norm(times, states, a, sigma, s);
  VerificationReport r = exact_report("ea_integral");
  double min_margin = std::numeric_limits<double>::infinity();
  int admissible = 0;

  for (double delta : delta_list) {
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("ea integral needs 0 < delta < 1");
    const double scale = a * std::pow(1.0 - delta, sigma);
    const double window = scale / (std::pow(2.0, sigma) - 1.0);
    const double factor = a * std::pow(2.0, 2.0 * sigma + 3.0) * ea / std::pow(1.0 - delta, sigma);

    double integral = 0.0;
    double prev_t = 0.0;
    double prev_g = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      if (t >= window) break;
      const DeltaOfTau dt = delta_of_tau(t, delta, sigma, a);
      if (!dt.inside) break;
      const double g = gevrey_norm(states[i], {sigma, dt.value, s}) /
                       std::pow(dt.value - delta, sigma);
      if (i > 0) integral += 0.5 * (g + prev_g) * (t - prev_t);
      prev_t = t;
      prev_g = g;
      const double rhs = factor * std::sqrt(scale / (scale - t));
      record(r, integral, rhs);
      min_margin = std::min(min_margin, rhs - integral);
      ++admissible;
    }
  }
  if (admissible == 0) throw DomainError("no recorded time lies in the delta(tau) window");
  r.metrics = {{"E_a", ea}, {"min_margin", min_margin}};
  return r;
}

VerificationReport verify_H_monotone(const Trajectory& traj, const ModelParams& p, double s) {
  VerificationReport r = exact_report("H_monotone");
  r.tolerance = 1e-6;
  if (traj.states.empty()) throw InputError("H monotonicity needs a non-empty trajectory");
  if (!small_data_check(traj.states.front(), p, s)) {
    r.kind = "skipped";
    r.skipped = 1;
    return r;
  }
  const double h0 = functional_H(traj.states.front(), p, s);
  for (const SpectralField& u : traj.states) {
    const double h = functional_H(u, p, s);
    ++r.cases;
    r.worst_ratio = std::max(r.worst_ratio, h0 > 0.0 ? h / h0 : (h > 0.0 ? HUGE_VAL : 1.0));
    if (h > h0 * (1.0 + r.tolerance)) ++r.violations;
  }
  r.metrics = {{"H0", h0}};
  return r;
}

}  // namespace chg
