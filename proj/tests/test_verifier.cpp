#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "chg/errors.hpp"
#include "chg/verifier.hpp"
#include "oracles.hpp"

using namespace chg;

namespace {

SpectralField cosine(const TorusGrid& grid, int m, double a) {
  SpectralField f(grid);
  f.set_mode(m, 0.5 * a);
  return f;
}

SpectralField constant(const TorusGrid& grid, double c) {
  SpectralField f(grid);
  f.set_mode(0, c);
  return f;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("random band-limited fields") {
  std::mt19937_64 a(42), b(42);
  const TorusGrid g = verifier_grid();
  const SpectralField f = random_band_limited(g, a);
  CHECK(oracle::max_diff(f, random_band_limited(g, b)) == 0.0);
  for (int m = g.n_points() / 4 + 1; m <= g.max_mode(); ++m) CHECK(f.coeff(m) == Complex{});
  CHECK(f.coeff(16) != Complex{});
  CHECK(f.coeff(0).imag() == 0.0);
}

TEST_CASE("embedding suite") {
  const VerificationReport r = verify_embedding(100, 42);
  CHECK(r.cases == 100 * 5 * 3);
  CHECK(r.violations == 0);
  CHECK(r.worst_ratio <= 1.0);

  const TorusGrid g(32);
  const SpectralField c = cosine(g, 3, 1.0);
  const double big = gevrey_norm(c, {1.0, 1.0, 0.0});
  const double small = gevrey_norm(c, {1.0, 0.5, 0.0});
  CHECK(big / small == doctest::Approx(std::exp(0.5 * std::sqrt(10.0))));
}

TEST_CASE("derivative bound: sharp constants and Helmholtz symbols") {
  const TorusGrid g(256);
  const double sigmas[] = {1.0, 2.0};
  const std::pair<double, double> pairs[] = {{0.6, 0.5}, {1.0, 0.5}};
  const DerivativeBoundResult res = verify_derivative_bound(g, sigmas, pairs, 20, 42);
  CHECK(res.sharp.violations == 0);
  CHECK(res.helmholtz.violations == 0);
  REQUIRE(res.cases.size() == 4);
  for (const SharpConstantCase& c : res.cases) {
    CHECK(c.sharp_G <= c.bound);
    CHECK(c.sharp_Gbar <= c.bound * (1.0 + 1e-12));
  }
  // sigma = 1, gap 0.5: x e^{-x/2} peaks at x = 2 with value 2/e.
  const SharpConstantCase& c = res.cases[1];
  CHECK(c.sigma == 1.0);
  CHECK(c.sharp_Gbar == doctest::Approx(2.0 / std::numbers::e).epsilon(1e-12));
  CHECK(c.bound == doctest::Approx(2.0 / std::numbers::e).epsilon(1e-12));
  CHECK(c.sharp_G < c.sharp_Gbar);
  CHECK(c.ratio_to_halved == doctest::Approx(2.0 * c.sharp_G / c.bound));

  const std::pair<double, double> bad[] = {{0.5, 0.6}};
  CHECK_THROWS_AS(verify_derivative_bound(g, sigmas, bad), InputError);
}

TEST_CASE("algebra suite") {
  const TorusGrid g = verifier_grid();
  const SpectralField one = constant(g, 1.0);
  const SpectralField fg = product(one, one);
  CHECK(sobolev_norm(fg, 1.0) / (sobolev_norm(one, 1.0) * sobolev_norm(one, 1.0)) == doctest::Approx(1.0));

  // cos^2 x = 1/2 + cos(2x)/2: |.|_{H^1}^2 = 1/4 + 2 (1/16) 5, and |cos x|_{H^1}^2 = 1.
  const SpectralField c = cosine(g, 1, 1.0);
  CHECK(sobolev_norm(product(c, c), 1.0) == doctest::Approx(std::sqrt(0.875)));

  const double s_list[] = {1.0, 2.0};
  const PinnedResult first = verify_algebra(50, 42, s_list);
  CHECK(first.report.violations == 0);
  CHECK(std::isfinite(first.pins[0]));
  CHECK(first.pins[0] == doctest::Approx(1.1 * first.observed[0]));
  CHECK(first.observed[0] >= 1.0 - 1e-12);
  const PinnedResult again = verify_algebra(50, 42, s_list, first.pins[0], first.pins[1]);
  CHECK(again.report.violations == 0);
  CHECK(again.observed == first.observed);
  const PinnedResult tight = verify_algebra(50, 42, s_list, 0.5 * first.observed[0], first.pins[1]);
  CHECK(tight.report.violations > 0);

  const double bad[] = {0.5};
  CHECK_THROWS_AS(verify_algebra(5, 42, bad), InputError);
}

TEST_CASE("norm equivalence suite") {
  const VerificationReport r = verify_norm_equivalence(100, 42);
  CHECK(r.violations == 0);
  CHECK(r.cases == 100 * 4 * 3 * 2 * 2);
  const TorusGrid g(16);
  const SpectralField c = cosine(g, 1, 1.0);
  CHECK(gevrey_norm_bar(c, {1.0, 0.5, 0.0}) <= gevrey_norm(c, {1.0, 0.5, 0.0}));
}

TEST_CASE("symbol lemma sides") {
  const RatioSides same = symbol_lemma_sides(3.0, 3.0, 0.2, 1.0, 2.0);
  CHECK(same.lhs == 0.0);
  for (double xi : {-5.0, 0.5, 10.0}) {
    const RatioSides s = symbol_lemma_sides(xi, 0.0, 0.0, 1.0, 1.0);
    CHECK(s.lhs == doctest::Approx(std::sqrt(1.0 + xi * xi) - 1.0));
    CHECK(s.rhs == doctest::Approx(2.0 * std::abs(xi)));
  }
  const PinnedResult r = verify_symbol_lemma(33);
  CHECK(std::isfinite(r.pins[0]));
  CHECK(r.report.violations == 0);
  CHECK(verify_symbol_lemma(33, r.pins[0]).report.violations == 0);
}

TEST_CASE("commutator estimate") {
  const TorusGrid g = verifier_grid();
  std::mt19937_64 rng(42);
  const SpectralField v = random_band_limited(g, rng);
  const SpectralField zero(g);
  CHECK(commutator_sides(v, zero, {1.0, 0.3, 2.0}).lhs == 0.0);

  const RatioSides unit = commutator_sides(constant(g, 1.0), v, {1.0, 0.0, 2.0});
  const double vs = sobolev_norm(v, 2.0);
  CHECK(unit.lhs == doctest::Approx(vs * vs).epsilon(1e-12));
  CHECK(unit.rhs == doctest::Approx(vs * vs).epsilon(1e-12));

  const PinnedResult first = verify_commutator_estimate(100, 42);
  CHECK(std::isfinite(first.pins[0]));
  CHECK(first.report.violations == 0);
  CHECK(verify_commutator_estimate(100, 42, first.pins[0]).report.violations == 0);
}

TEST_CASE("interpolation suite") {
  const double l_list[] = {1.0, 2.0 / 3.0, 0.5, 0.4};
  const VerificationReport r = verify_interpolation(200, 42, l_list);
  CHECK(r.violations == 0);
  CHECK(r.cases == 200 * 2 * 3 * 2 * 4);
  const double bad[] = {0.0};
  CHECK_THROWS_AS(verify_interpolation(1, 42, bad), InputError);
}

TEST_CASE("E_a integral bound") {
  const TorusGrid g(32);
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(0.01 * i);
  const std::vector<SpectralField> frozen(times.size(), cosine(g, 1, 0.01));
  const double deltas[] = {0.25};
  const VerificationReport r = verify_ea_integral(times, frozen, 1.0, 1.0, 2.0, deltas);
  CHECK(r.violations == 0);
  CHECK(r.cases > 0);
  CHECK(r.metrics.at("min_margin") > 0.0);

  const std::vector<SpectralField> zeros(times.size(), SpectralField(g));
  const VerificationReport z = verify_ea_integral(times, zeros, 1.0, 1.0, 2.0, deltas);
  CHECK(z.violations == 0);
  CHECK(z.worst_ratio == 0.0);
}

TEST_CASE("H monotonicity") {
  const TorusGrid g(32);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  cfg.record_every = 20;

  ModelParams p;
  p.alpha = 0.02;
  p.Gamma = 0.01;
  const Trajectory zero = integrate(SpectralField(g), p, cfg);
  const VerificationReport rz = verify_H_monotone(zero, p, 2.0);
  CHECK(rz.violations == 0);
  CHECK(rz.metrics.at("H0") == doctest::Approx(0.03));

  const Trajectory flat = integrate(constant(g, 0.01), ModelParams{}, cfg);
  CHECK(verify_H_monotone(flat, ModelParams{}, 2.0).violations == 0);
  for (std::size_t i = 1; i < flat.states.size(); ++i) {
    CHECK(functional_H(flat.states[i], ModelParams{}, 2.0) < functional_H(flat.states[i - 1], ModelParams{}, 2.0));
  }

  const Trajectory big = integrate(cosine(g, 1, 1.0), ModelParams{}, cfg);
  const VerificationReport skipped = verify_H_monotone(big, ModelParams{}, 2.0);
  CHECK(skipped.kind == "skipped");
  CHECK(skipped.skipped == 1);
  CHECK(skipped.violations == 0);
}

TEST_CASE("pins file round trip") {
  const std::string path = temp_path("chg_pins_test.json");
  EmpiricalConstants c{1.5, 1.25, 3e13, 2.0, "2026-01-01T00:00:00Z"};
  save_pins(path, c, 42);
  const auto back = load_pins(path);
  REQUIRE(back);
  CHECK(back->C_s_algebra == 1.5);
  CHECK(back->C_bar_s == 1.25);
  CHECK(back->C_sym_lemma == 3e13);
  CHECK(back->C_commutator == 2.0);
  CHECK(back->pin_date_metadata == "2026-01-01T00:00:00Z");

  CHECK_FALSE(load_pins(temp_path("chg_no_such_pins.json")));
  {
    std::ofstream bad(path);
    bad << "{\"pins\": {\"C_s_algebra\": 1}}";
  }
  CHECK_THROWS_AS(load_pins(path), InputError);
  std::remove(path.c_str());
}
