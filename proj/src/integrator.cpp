#include "chg/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "chg/analyticity.hpp"

namespace chg {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("SolverConfig: dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw InputError("SolverConfig: t_end must be positive");
  }
  if (record_every < 1) throw InputError("SolverConfig: record_every must be >= 1");
}

double stability_bound(const SpectralField& u, const ModelParams& p) {
  double umax = 0.0;
  for (double v : to_physical(u)) umax = std::max(umax, std::abs(v));
  return 1.0 / (u.grid().k_max() * (umax + std::abs(p.Gamma)) + p.lambda);
}

SpectralField step_rk4(const SpectralField& u, const ModelParams& p, double dt, double t_now,
                       Dealias dealias) {
  if (!(dt > 0.0)) throw InputError("step_rk4: dt must be positive");
  try {
    const SpectralField k1 = rhs(u, p, dealias);
    const SpectralField k2 = rhs(SpectralField(u).add_scaled(0.5 * dt, k1), p, dealias);
    const SpectralField k3 = rhs(SpectralField(u).add_scaled(0.5 * dt, k2), p, dealias);
    const SpectralField k4 = rhs(SpectralField(u).add_scaled(dt, k3), p, dealias);

    SpectralField incr = k1;
    incr.add_scaled(2.0, k2).add_scaled(2.0, k3) += k4;
    SpectralField next = u;
    next.add_scaled(dt / 6.0, incr);
    if (!next.is_finite()) throw BlowUpError(t_now + dt, "non-finite state");
    return SpectralField::symmetrized(next.grid(),
                                      std::vector<Complex>(next.coeffs().begin(),
                                                           next.coeffs().end()));
  } catch (const OverflowError& e) {
    throw BlowUpError(t_now + dt, e.what());
  }
}

namespace {

// Solver-side diagnostics; the radius ODE columns are filled by track_radius.
RadiusRecord diagnose(double t, const SpectralField& u, const ModelParams& p, double s) {
  RadiusRecord r;
  r.t = t;
  r.sobolev_s = sobolev_norm(u, s);
  r.b_val = 1.0 + r.sobolev_s;
  if (s > 1.5) r.H_val = functional_H(u, p, s);
  const MeasuredRadius radius = measured_radius(u, 1.0);
  r.delta_fit = radius.delta;
  r.delta_fit_resolved = radius.resolved;
  return r;
}

}  // namespace

Trajectory integrate(const SpectralField& u0, const ModelParams& p, const SolverConfig& cfg) {
  cfg.validate();
  p.validate();
  if (!u0.is_finite()) throw InputError("integrate: initial datum is not finite");

  Trajectory traj;
  traj.dt_within_stability_bound = cfg.dt <= stability_bound(u0, p);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.diagnostics.push_back(diagnose(0.0, u0, p, cfg.s_monitor));

  const auto total = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  SpectralField u = u0;
  double t = 0.0;
  for (long i = 1; i <= total; ++i) {
    const double t_next = (i == total) ? cfg.t_end : static_cast<double>(i) * cfg.dt;
    try {
      u = step_rk4(u, p, t_next - t, t, cfg.dealias_mode());
    } catch (const BlowUpError& e) {
      throw BlowUpError(e.time(), "non-finite state",
                        std::make_shared<const Trajectory>(std::move(traj)));
    }
    t = t_next;
    const double norm = sobolev_norm(u, cfg.s_monitor);
    if (!(norm <= kBlowupThreshold)) {
      throw BlowUpError(t, "Sobolev norm " + std::to_string(norm) + " exceeds threshold",
                        std::make_shared<const Trajectory>(std::move(traj)));
    }
    if (i % cfg.record_every == 0 || i == total) {
      traj.times.push_back(t);
      traj.states.push_back(u);
      traj.diagnostics.push_back(diagnose(t, u, p, cfg.s_monitor));
    }
  }
  return traj;
}

PicardResult picard_iterate(const SpectralField& u0, const ModelParams& p, double sigma, double s,
                            double T, int n_iters, const PicardOptions& options) {
  p.validate();
  if (n_iters < 1) throw InputError("picard_iterate: n_iters must be >= 1");
  if (options.quadrature_nodes < 2) throw InputError("picard_iterate: need >= 2 nodes");

  PicardResult result;
  const double u0_norm = gevrey_norm(u0, GevreyIndex{sigma, 1.0, s});
  const LifespanBounds bounds = lifespan_bounds(u0_norm, sigma, options.C_prime);
  result.window = holomorphy_window(bounds.T0_closed_form, 0.0, sigma);
  if (!(T > 0.0) || !(T < result.window)) {
    throw DomainError("picard_iterate: horizon " + std::to_string(T) +
                      " outside the holomorphy window (0, " + std::to_string(result.window) +
                      ")");
  }

  const auto nodes = static_cast<std::size_t>(options.quadrature_nodes);
  const double h = T / static_cast<double>(nodes - 1);
  result.times.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) result.times[j] = h * static_cast<double>(j);
  result.iterates.emplace_back(nodes, u0);

  const SpectralField zero(u0.grid());
  std::vector<SpectralField> diff_prev;
  for (int n = 0; n < n_iters; ++n) {
    const std::vector<SpectralField>& current = result.iterates.back();
    std::vector<SpectralField> diff(nodes, zero);
    try {
      // integrand_j = F(u_n(t_j)) - F(u_{n-1}(t_j)), or F(u0) for n = 0
      std::vector<SpectralField> integrand;
      integrand.reserve(nodes);
      if (n == 0) {
        integrand.assign(nodes, rhs(u0, p, options.dealias));
      } else {
        const std::vector<SpectralField>& previous = result.iterates[static_cast<std::size_t>(n - 1)];
        for (std::size_t j = 0; j < nodes; ++j) {
          integrand.push_back(rhs_increment(previous[j], diff_prev[j], p, options.dealias));
        }
      }
      for (std::size_t j = 1; j < nodes; ++j) {
        diff[j] = diff[j - 1];
        diff[j].add_scaled(0.5 * h, integrand[j - 1]).add_scaled(0.5 * h, integrand[j]);
      }
    } catch (const OverflowError&) {
      result.diverged_at = n + 1;
      break;
    }

    std::vector<SpectralField> next;
    next.reserve(nodes);
    bool finite = true;
    for (std::size_t j = 0; j < nodes; ++j) {
      next.push_back(current[j] + diff[j]);
      finite = finite && next.back().is_finite();
    }
    if (!finite) {
      result.diverged_at = n + 1;
      break;
    }

    double norm = 0.0;
    try {
      norm = ea_norm(result.times, diff, T, sigma, s);
    } catch (const OverflowError&) {
      result.diverged_at = n + 1;
      break;
    }
    if (!result.difference_norms.empty()) {
      const double prev = result.difference_norms.back();
      result.ratios.push_back(prev > 0.0 ? norm / prev : 0.0);
    }
    result.difference_norms.push_back(norm);
    result.iterates.push_back(std::move(next));
    diff_prev = std::move(diff);
  }
  return result;
}

}  // namespace chg
