#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "chg/analyticity.hpp"
#include "chg/errors.hpp"
#include "oracles.hpp"

using namespace chg;
using oracle::rel;

namespace {

SpectralField decaying(const TorusGrid& grid, double delta, double sigma, double amp = 1.0) {
  SpectralField f(grid);
  for (int m = 0; m < grid.max_mode(); ++m) {
    f.set_mode(m, amp * std::exp(-delta * std::pow(m, 1.0 / sigma)));
  }
  return f;
}

SpectralField cosine(const TorusGrid& grid, int m, double a) {
  SpectralField f(grid);
  f.set_mode(m, 0.5 * a);
  return f;
}

}  // namespace

TEST_CASE("radius fit recovers exact exponential decay") {
  const TorusGrid g(128);
  const RadiusEstimate e = estimate_radius(decaying(g, 0.8, 1.0), 1.0);
  CHECK(e.delta_fit == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(e.residual < 1e-10);
  CHECK(e.mode_first == 2);
  CHECK(e.modes_count >= kMinFitModes);

  const RadiusEstimate e2 = estimate_radius(decaying(g, 1.5, 2.0), 2.0);
  CHECK(e2.delta_fit == doctest::Approx(1.5).epsilon(1e-10));

  // Modes below the floor are ignored: e^{-0.8 m} drops under 1e-14 past m ~ 40.
  CHECK(e.mode_last <= 41);
}

TEST_CASE("radius fit needs enough resolved modes") {
  const TorusGrid g(64);
  const SpectralField c = cosine(g, 1, 0.01);
  CHECK_THROWS_AS(estimate_radius(c, 1.0), InsufficientDecayError);
  const MeasuredRadius m = measured_radius(c, 1.0);
  CHECK_FALSE(m.resolved);
  CHECK(m.delta == doctest::Approx(std::log(1e14)));

  SpectralField five(g);
  for (int k = 1; k <= 5; ++k) five.set_mode(k, std::exp(-k));
  const MeasuredRadius m5 = measured_radius(five, 2.0);
  CHECK_FALSE(m5.resolved);
  CHECK(m5.delta == doctest::Approx(std::log(1e14) / std::sqrt(5.0)));
  CHECK(measured_radius(decaying(g, 0.8, 1.0), 1.0).resolved);
}

TEST_CASE("lifespan constants") {
  CHECK(d_sigma(1.0) == 4.0);
  CHECK(d_sigma(2.0) == doctest::Approx(1.0 / (2.0 + 0.125)));

  const LifespanBounds z = lifespan_bounds(0.0, 1.0, 1.0);
  CHECK(rel(z.T0_closed_form, 1.0 / (1024.0 * (std::exp(-1.0) + 2.0))) < 1e-14);
  CHECK(z.M == 0.0);
  CHECK(z.R == 1.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> us(1.0, 4.0), un(0.0, 3.0), uc(0.1, 10.0);
  for (int i = 0; i < 50; ++i) {
    const double sigma = us(rng), norm = un(rng), C = uc(rng);
    const LifespanBounds b = lifespan_bounds(norm, sigma, C);
    const double A = std::exp(-sigma) * std::pow(sigma, sigma) + 2.0;
    const double R = 1.0 + norm;
    CHECK(rel(b.L, 16.0 * C * A * std::pow(R, 4)) < 1e-13);
    CHECK(b.M <= std::pow(2.0, 2.0 * sigma + 3.0) * b.L * b.R);
    CHECK(rel(b.T0_closed_form, 1.0 / (std::pow(2.0, 2.0 * sigma + 8.0) * C * A * std::pow(R, 4))) < 1e-13);
    CHECK(b.T0_closed_form <= b.T0_min_formula * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(lifespan_bounds(1.0, 0.9, 1.0), InputError);
  CHECK_THROWS_AS(lifespan_bounds(1.0, 1.0, 0.0), InputError);
  CHECK(holomorphy_window(1.0, 0.5, 2.0) == doctest::Approx(0.25 / 3.0));
}

TEST_CASE("auxiliary radius delta(tau)") {
  for (double sigma : {1.0, 1.5, 3.0}) {
    const DeltaOfTau d0 = delta_of_tau(0.0, 0.3, sigma, 2.0);
    CHECK(d0.value == doctest::Approx(0.65));
    CHECK(d0.inside);
  }
  // sigma = 1 closed form: (1+d)/2 + ((1-d-t/a) - (1-d+3t/a))/8 = (1+d)/2 - t/(2a)
  const DeltaOfTau d = delta_of_tau(0.1, 0.4, 1.0, 1.0);
  CHECK(d.value == doctest::Approx(0.7 - 0.05));
  CHECK_THROWS_AS(delta_of_tau(0.61, 0.4, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(delta_of_tau(-0.1, 0.4, 1.0, 1.0), DomainError);
  const DeltaOfTau edge = delta_of_tau(0.59, 0.4, 1.0, 1.0);
  CHECK(edge.inside);
  CHECK(edge.value == doctest::Approx(0.405));
  CHECK_FALSE(delta_of_tau(0.5, 0.5, 1.0, 1.0).inside);

  double prev = 1.0;
  for (double t = 0.0; t < 0.5; t += 0.05) {
    const double v = delta_of_tau(t, 0.2, 2.0, 1.0).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("E_a norm of a frozen trajectory") {
  const TorusGrid g(32);
  const SpectralField u = cosine(g, 2, 0.1);
  const std::vector<double> times{0.0, 0.1, 0.2, 0.3};
  const std::vector<SpectralField> states(4, u);
  const double a = 1.0;
  double expect = 0.0;
  for (int i = 1; i <= 19; ++i) {
    const double delta = 0.05 * i;
    for (double t : times) {
      if (!(t < a * (1.0 - delta))) continue;
      const double w = (1.0 - delta) * std::sqrt(1.0 - t / (a * (1.0 - delta)));
      const double norm = std::sqrt(2.0 * 0.0025 * 5.0 * std::exp(2.0 * delta * std::sqrt(5.0)));
      expect = std::max(expect, norm * w);
    }
  }
  CHECK(rel(ea_norm(times, states, a, 1.0, 1.0), expect) < 1e-13);
  CHECK(ea_delta_grid().front() == doctest::Approx(0.05));
  CHECK(ea_delta_grid().back() == doctest::Approx(0.95));
  const std::vector<double> late{5.0};
  CHECK_THROWS_AS(ea_norm(late, std::vector<SpectralField>{u}, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("radius ODE steps") {
  const TorusGrid g(32);
  const SpectralField u0 = cosine(g, 1, 0.1);
  RadiusODEState st = radius_ode_init(u0, 1.0, 2.0, 0.5, 0.25);
  const double gnorm = 1.0 + gevrey_norm(u0, {1.0, 0.5, 2.0});
  CHECK(st.f_sq == doctest::Approx(2.0 * gnorm * gnorm));
  CHECK(st.delta_theory == 0.5);

  const double f0 = st.f_sq, b0 = st.b_prev;
  const RadiusODEState next = radius_ode_advance(st, 1.2, 0.01);
  const double f1 = f0 + 0.25 * (std::pow(b0, 5) + std::pow(1.2, 5)) * 0.01;
  CHECK(next.f_sq == doctest::Approx(f1).epsilon(1e-14));
  const double expect =
      0.5 * std::exp(-8.0 * 0.25 * 0.5 * (std::pow(f0, 1.5) + std::pow(f1, 1.5)) * 0.01);
  CHECK(next.delta_theory == doctest::Approx(expect).epsilon(1e-14));

  RadiusODEState frozen = radius_ode_init(u0, 1.0, 2.0, 0.5, 0.0);
  frozen = radius_ode_advance(frozen, 3.0, 10.0);
  CHECK(frozen.delta_theory == 0.5);

  RadiusODEState fast = radius_ode_init(u0, 1.0, 2.0, 0.5, 1e6);
  fast = radius_ode_advance(fast, 2.0, 10.0);
  CHECK(fast.clamped);
  CHECK(fast.delta_theory > 0.0);
  CHECK_THROWS_AS(radius_ode_advance(st, 0.5, 0.1), InputError);
  CHECK_THROWS_AS(radius_ode_init(u0, 1.0, 2.0, 1.0, 1.0), InputError);
}

TEST_CASE("measured-versus-theory bookkeeping") {
  std::vector<RadiusRecord> recs(3);
  recs[0] = {0.0, 0, 0, 0.8, 0.5};
  recs[1] = {0.5, 0, 0, 0.7, 0.4};
  recs[2] = {1.5, 0, 0, 0.3, 0.45};
  MeasuredVsTheory all = check_measured_vs_theory(recs);
  CHECK(all.violations == 1);
  CHECK_FALSE(all.delta_nonincreasing);
  CHECK(all.worst_margin == doctest::Approx(-0.15));
  MeasuredVsTheory head = check_measured_vs_theory(recs, 1.0);
  CHECK(head.records == 2);
  CHECK(head.passed());
}

TEST_CASE("tracking and calibration along a small-data run") {
  const TorusGrid g(32);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  cfg.record_every = 10;
  const Trajectory traj = integrate(cosine(g, 1, 0.01), ModelParams{}, cfg);
  RadiusTrackingConfig rc;
  const double c = calibrate_c_cal(traj, ModelParams{}, rc, 1.3, 1.0);
  const double j = std::log2(c / 1.3);
  CHECK(j == doctest::Approx(std::round(j)));
  rc.C_cal = c;
  const auto recs = track_radius(traj, ModelParams{}, rc);
  REQUIRE(recs.size() == traj.times.size());
  CHECK(check_measured_vs_theory(recs).passed());
  for (const RadiusRecord& r : recs) {
    CHECK(r.b_val == doctest::Approx(1.0 + r.sobolev_s));
    CHECK(r.f_val >= std::sqrt(2.0));
  }
  CHECK_THROWS_AS(calibrate_c_cal(traj, ModelParams{}, rc, 0.0), InputError);
}

TEST_CASE("continuity experiment on small perturbations") {
  const TorusGrid g(32);
  const SpectralField limit = cosine(g, 1, 0.01);
  std::vector<SpectralField> seq;
  for (int n = 1; n <= 3; ++n) seq.push_back(limit + cosine(g, 2, std::pow(10.0, -n)));
  const ContinuityReport rep = continuity_experiment(seq, limit, ModelParams{}, 1.0, 2.0, SolverConfig{});
  CHECK(rep.horizon > 0.0);
  REQUIRE(rep.distances.size() == 3);
  CHECK(rep.passed());
  CHECK(rep.decreasing_with_slack);
  for (std::size_t n = 0; n < 3; ++n) CHECK(rep.distances[n] <= rep.bounds[n]);

  const std::vector<SpectralField> none;
  CHECK_THROWS_AS(continuity_experiment(none, limit, ModelParams{}, 1.0, 2.0, SolverConfig{}), InputError);
}
