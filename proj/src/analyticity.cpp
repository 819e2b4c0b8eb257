#include "chg/analyticity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

namespace chg {
namespace {

constexpr double kDeltaFloor = 1e-300;

double lifespan_factor(double sigma) {
  return std::exp(-sigma) * std::pow(sigma, sigma) + 2.0;
}

struct Measurement {
  double sobolev = 0.0;
  double H = 0.0;
  MeasuredRadius radius;
};

std::vector<Measurement> measure(const Trajectory& traj, const ModelParams& p,
                                 const RadiusTrackingConfig& cfg) {
  std::vector<Measurement> out;
  out.reserve(traj.states.size());
  for (const SpectralField& u : traj.states) {
    out.push_back({sobolev_norm(u, cfg.s), functional_H(u, p, cfg.s), measured_radius(u, cfg.sigma)});
  }
  return out;
}

std::vector<RadiusRecord> integrate_radius(const Trajectory& traj,
                                           const std::vector<Measurement>& measured,
                                           const RadiusTrackingConfig& cfg,
                                           std::size_t count) {
  std::vector<RadiusRecord> records;
  if (count == 0) return records;
  records.reserve(count);
  RadiusODEState state =
      radius_ode_init(traj.states.front(), cfg.sigma, cfg.s, cfg.delta0, cfg.C_cal);
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) {
      state = radius_ode_advance(state, 1.0 + measured[i].sobolev,
                                 traj.times[i] - traj.times[i - 1]);
    }
    RadiusRecord r;
    r.t = traj.times[i];
    r.sobolev_s = measured[i].sobolev;
    r.b_val = 1.0 + measured[i].sobolev;
    r.H_val = measured[i].H;
    r.delta_fit = measured[i].radius.delta;
    r.delta_fit_resolved = measured[i].radius.resolved;
    r.delta_theory = state.delta_theory;
    r.delta_theory_clamped = state.clamped;
    r.f_val = std::sqrt(state.f_sq);
    r.gevrey_norm_at_delta_theory =
        gevrey_norm(traj.states[i], GevreyIndex{cfg.sigma, state.delta_theory, cfg.s});
    records.push_back(r);
  }
  return records;
}

}  // namespace

// ------------------------------------------------------------- radius fit

RadiusEstimate estimate_radius(const SpectralField& field, double sigma) {
  if (!(sigma >= 1.0)) throw InputError("estimate_radius: sigma must be >= 1");
  const TorusGrid& grid = field.grid();
  const double floor = kNoiseFloor * field.max_abs_coeff();

  std::vector<double> xs, ys;
  RadiusEstimate est;
  for (int m = 2; m <= grid.max_mode(); ++m) {
    const double mag = std::abs(field.coeff(m));
    if (!(mag > floor) || mag == 0.0) continue;
    xs.push_back(std::pow(std::abs(grid.wavenumber(m)), 1.0 / sigma));
    ys.push_back(std::log(mag));
    if (est.modes_count == 0) est.mode_first = m;
    est.mode_last = m;
    ++est.modes_count;
  }
  if (est.modes_count < kMinFitModes) {
    throw InsufficientDecayError("estimate_radius: only " + std::to_string(est.modes_count) +
                                 " modes above the noise floor (need " +
                                 std::to_string(kMinFitModes) + ")");
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  est.intercept = my - slope * mx;
  est.delta_fit = -slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (est.intercept + slope * xs[i]);
    ss += r * r;
  }
  est.residual = std::sqrt(ss / n);
  return est;
}

MeasuredRadius measured_radius(const SpectralField& field, double sigma) {
  try {
    return {estimate_radius(field, sigma).delta_fit, true};
  } catch (const InsufficientDecayError&) {
    const TorusGrid& grid = field.grid();
    const double floor = kNoiseFloor * field.max_abs_coeff();
    int highest = 1;
    for (int m = 1; m <= grid.max_mode(); ++m) {
      if (std::abs(field.coeff(m)) > floor) highest = m;
    }
    const double k = std::abs(grid.wavenumber(highest));
    return {std::log(1.0 / kNoiseFloor) / std::pow(k, 1.0 / sigma), false};
  }
}

// -------------------------------------------------------- lifespan bounds

double d_sigma(double sigma) {
  return 1.0 / (std::pow(2.0, sigma) - 2.0 + std::pow(2.0, -(sigma + 1.0)));
}

LifespanBounds lifespan_bounds(double u0_gevrey_norm, double sigma, double C_prime) {
  if (!(sigma >= 1.0)) throw InputError("lifespan_bounds: sigma must be >= 1");
  if (!(C_prime > 0.0)) throw InputError("lifespan_bounds: C' must be positive");
  if (!(u0_gevrey_norm >= 0.0)) throw InputError("lifespan_bounds: norm must be nonnegative");

  const double A = lifespan_factor(sigma);
  const double R = 1.0 + u0_gevrey_norm;
  const double R4 = std::pow(R, 4.0);
  const double two_s = std::pow(2.0, sigma);

  LifespanBounds b;
  b.C_prime = C_prime;
  b.R = R;
  b.D_sigma = d_sigma(sigma);
  b.L = 16.0 * C_prime * A * R4;
  b.M = 0.5 * C_prime * A * u0_gevrey_norm * R4;
  const double first = 1.0 / (std::pow(2.0, 2.0 * sigma + 4.0) * b.L);
  const double second = (two_s - 1.0) * R /
                        ((two_s - 1.0) * std::pow(2.0, 2.0 * sigma + 3.0) * b.L * R +
                         b.M * b.D_sigma);
  b.T0_min_formula = std::min(first, second);
  b.T0_closed_form = 1.0 / (std::pow(2.0, 2.0 * sigma + 8.0) * C_prime * A * R4);
  return b;
}

double holomorphy_window(double T0, double delta, double sigma) {
  return T0 * std::pow(1.0 - delta, sigma) / (std::pow(2.0, sigma) - 1.0);
}

// ------------------------------------------------------- delta(tau), E_a

DeltaOfTau delta_of_tau(double tau, double delta, double sigma, double a) {
  if (!(sigma >= 1.0)) throw InputError("delta_of_tau: sigma must be >= 1");
  if (!(a > 0.0)) throw InputError("delta_of_tau: a must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta_of_tau: delta must lie in (0,1)");
  if (!(tau >= 0.0)) throw DomainError("delta_of_tau: tau must be nonnegative");
  const double base = std::pow(1.0 - delta, sigma);
  const double lower = base - tau / a;
  if (lower < 0.0) {
    throw DomainError("delta_of_tau: tau=" + std::to_string(tau) +
                      " beyond the root domain a (1-delta)^sigma");
  }
  const double upper = base + (std::pow(2.0, sigma + 1.0) - 1.0) * tau / a;
  DeltaOfTau out;
  out.value = 0.5 * (1.0 + delta) + std::pow(0.5, 2.0 + 1.0 / sigma) *
                                        (std::pow(lower, 1.0 / sigma) -
                                         std::pow(upper, 1.0 / sigma));
  out.inside = delta < out.value && out.value < 1.0;
  return out;
}

const std::array<double, 19>& ea_delta_grid() {
  static const std::array<double, 19> grid = [] {
    std::array<double, 19> g{};
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.05 * static_cast<double>(i + 1);
    return g;
  }();
  return grid;
}

double ea_norm(std::span<const double> times, std::span<const SpectralField> states, double a,
               double sigma, double s) {
  if (times.size() != states.size()) throw InputError("ea_norm: times/states size mismatch");
  if (!(a > 0.0)) throw InputError("ea_norm: a must be positive");
  if (!(sigma >= 1.0)) throw InputError("ea_norm: sigma must be >= 1");
  const double denom = std::pow(2.0, sigma) - 1.0;
  double sup = 0.0;
  bool any = false;
  for (double delta : ea_delta_grid()) {
    const double scale = std::pow(1.0 - delta, sigma);
    const double window = a * scale / denom;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = std::abs(times[i]);
      if (!(t < window)) continue;
      any = true;
      const double weight = scale * std::sqrt(1.0 - t / (a * scale));
      sup = std::max(sup, gevrey_norm(states[i], GevreyIndex{sigma, delta, s}) * weight);
    }
  }
  if (!any) throw DomainError("ea_norm: no recorded time inside any delta window");
  return sup;
}

// ---------------------------------------------------------- radius ODE

RadiusODEState radius_ode_init(const SpectralField& u0, double sigma, double s, double delta0,
                               double C_cal) {
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw InputError("radius ODE: delta0 must lie in (0,1)");
  if (!(C_cal >= 0.0)) throw InputError("radius ODE: C must be nonnegative");
  RadiusODEState st;
  st.delta0 = delta0;
  st.delta_theory = delta0;
  st.C_cal = C_cal;
  const double g = 1.0 + gevrey_norm(u0, GevreyIndex{sigma, delta0, s});
  st.f_sq = 2.0 * g * g;
  st.b_prev = 1.0 + sobolev_norm(u0, s);
  return st;
}

RadiusODEState radius_ode_advance(RadiusODEState state, double b_now, double dt) {
  if (!(b_now >= 1.0)) throw InputError("radius ODE: b must be >= 1");
  if (!(dt >= 0.0)) throw InputError("radius ODE: dt must be nonnegative");
  if (dt == 0.0) return state;
  const double f_old = state.f_sq;
  state.f_sq = f_old + state.C_cal * (std::pow(state.b_prev, 5.0) + std::pow(b_now, 5.0)) * dt;
  const double f3 = 0.5 * (std::pow(f_old, 1.5) + std::pow(state.f_sq, 1.5));
  double next = state.delta_theory * std::exp(-8.0 * state.C_cal * f3 * dt);
  if (!(next >= kDeltaFloor)) {
    next = kDeltaFloor;
    state.clamped = true;
  }
  state.delta_theory = std::min(next, state.delta_theory);
  state.b_prev = b_now;
  return state;
}

void RadiusTrackingConfig::validate() const {
  if (!(sigma >= 1.0)) throw InputError("radius tracking: sigma must be >= 1");
  if (!(s > 1.5)) throw InputError("radius tracking: s must exceed 3/2");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw InputError("radius tracking: delta0 in (0,1)");
  if (!(C_cal >= 0.0)) throw InputError("radius tracking: C_cal must be nonnegative");
}

std::vector<RadiusRecord> track_radius(const Trajectory& traj, const ModelParams& p,
                                       const RadiusTrackingConfig& cfg) {
  cfg.validate();
  const std::vector<Measurement> measured = measure(traj, p, cfg);
  return integrate_radius(traj, measured, cfg, traj.states.size());
}

MeasuredVsTheory check_measured_vs_theory(std::span<const RadiusRecord> records, double t_max) {
  MeasuredVsTheory out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  for (const RadiusRecord& r : records) {
    if (r.t > t_max) break;
    ++out.records;
    if (r.delta_theory > r.delta_fit) ++out.violations;
    out.worst_margin = std::min(out.worst_margin, r.delta_fit - r.delta_theory);
    if (!(r.delta_theory > 0.0)) out.delta_positive = false;
    if (r.delta_theory > prev) out.delta_nonincreasing = false;
    prev = r.delta_theory;
  }
  return out;
}

double calibrate_c_cal(const Trajectory& traj, const ModelParams& p, RadiusTrackingConfig cfg,
                       double C_s_algebra, double t_max) {
  if (!(C_s_algebra > 0.0)) throw InputError("calibrate_c_cal: algebra constant must be positive");
  cfg.C_cal = C_s_algebra;
  cfg.validate();
  std::size_t count = 0;
  while (count < traj.times.size() && traj.times[count] <= t_max) ++count;
  Trajectory head;
  head.times.assign(traj.times.begin(), traj.times.begin() + static_cast<long>(count));
  head.states.assign(traj.states.begin(), traj.states.begin() + static_cast<long>(count));
  const std::vector<Measurement> measured = measure(head, p, cfg);
  for (int j = 0; j <= 62; ++j) {
    cfg.C_cal = C_s_algebra * std::ldexp(1.0, j);
    const auto records = integrate_radius(head, measured, cfg, count);
    if (check_measured_vs_theory(records, t_max).passed()) return cfg.C_cal;
  }
  throw DomainError("calibrate_c_cal: no power-of-two multiple satisfies the radius bound");
}

// ---------------------------------------------------------- continuity

bool ContinuityReport::passed() const {
  return strictly_decreasing &&
         std::all_of(within_bound.begin(), within_bound.end(), [](bool b) { return b; });
}

ContinuityReport continuity_experiment(std::span<const SpectralField> u0_sequence,
                                       const SpectralField& u0_limit, const ModelParams& p,
                                       double sigma, double s, const SolverConfig& cfg,
                                       const ContinuityOptions& options) {
  if (u0_sequence.empty()) throw InputError("continuity_experiment: empty data sequence");
  if (options.steps < 1) throw InputError("continuity_experiment: steps must be >= 1");
  for (const SpectralField& u : u0_sequence) {
    if (!(u.grid() == u0_limit.grid())) throw InputError("continuity_experiment: grid mismatch");
  }
  const GevreyIndex g1{sigma, 1.0, s};
  const double A = lifespan_factor(sigma);

  ContinuityReport report;
  double horizon = std::numeric_limits<double>::infinity();
  for (const SpectralField& u : u0_sequence) {
    const double norm = gevrey_norm(u, g1);
    if (!std::isfinite(norm)) throw InputError("continuity_experiment: datum not in G^1");
    horizon = std::min(horizon, 1.0 / (std::pow(2.0, 2.0 * sigma + 8.0) * options.C_prime * A *
                                       std::pow(2.0 + norm, 4.0)));
  }
  report.horizon = horizon;

  SolverConfig run = cfg;
  run.t_end = horizon;
  run.dt = std::min(cfg.dt, horizon / options.steps);
  run.record_every = 1;

  auto solve = [&](const SpectralField& u0, std::size_t label) {
    try {
      return integrate(u0, p, run);
    } catch (const BlowUpError& e) {
      const std::string who = label == 0 ? "limit datum" : "datum n=" + std::to_string(label);
      throw BlowUpError(e.time(), who + " blew up before the common horizon");
    }
  };

  auto limit_future = std::async(std::launch::async, solve, std::cref(u0_limit), 0);
  std::vector<std::future<Trajectory>> futures;
  for (std::size_t n = 0; n < u0_sequence.size(); ++n) {
    futures.push_back(std::async(std::launch::async, solve, std::cref(u0_sequence[n]), n + 1));
  }
  const Trajectory limit = limit_future.get();

  for (std::size_t n = 0; n < futures.size(); ++n) {
    const Trajectory traj = futures[n].get();
    std::vector<SpectralField> diff;
    diff.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) diff.push_back(traj.states[i] - limit.states[i]);
    const double dist = ea_norm(traj.times, diff, horizon, sigma, s);
    const double bound = 2.0 * gevrey_norm(u0_sequence[n] - u0_limit, g1) + options.budget;
    report.distances.push_back(dist);
    report.bounds.push_back(bound);
    report.within_bound.push_back(dist <= bound);
    if (n > 0) {
      const double prev = report.distances[n - 1];
      if (!(dist < prev)) report.strictly_decreasing = false;
      if (!(dist <= 1.1 * prev)) report.decreasing_with_slack = false;
    }
  }
  return report;
}

}  // namespace chg
