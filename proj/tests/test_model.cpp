#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "chg/errors.hpp"
#include "chg/model.hpp"
#include "oracles.hpp"

using namespace chg;
using oracle::Modes;

namespace {

SpectralField cosine(const TorusGrid& grid, int m, double a) {
  SpectralField f(grid);
  f.set_mode(m, 0.5 * a);
  return f;
}

// Adds a * sin(m x) to the mode map.
void add_sin(Modes& out, int m, double a) {
  out[m] += Complex{0.0, -0.5 * a};
  out[-m] += Complex{0.0, 0.5 * a};
}

void add_cos(Modes& out, int m, double a) {
  out[m] += 0.5 * a;
  out[-m] += 0.5 * a;
}

// F(a cos x) worked out by hand with trigonometric identities.
Modes rhs_of_cosine(double a, const ModelParams& p) {
  Modes out;
  add_sin(out, 2, 0.6 * a * a);
  add_cos(out, 1, -p.lambda * a);
  add_sin(out, 1, p.Gamma * a - 0.5 * (p.alpha + p.Gamma) * a);
  add_sin(out, 1, -p.beta * a * a * a / 8.0);
  add_sin(out, 3, -p.beta * a * a * a / 40.0);
  const double a4 = a * a * a * a;
  add_sin(out, 2, -p.gamma * a4 / 20.0);
  add_sin(out, 4, -p.gamma * a4 / 136.0);
  return out;
}

}  // namespace

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.lambda = 0.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p.lambda = 1.0;
  p.beta = std::nan("");
  CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("constant data only feel the damping") {
  const TorusGrid g(32);
  SpectralField c(g);
  c.set_mode(0, 0.1);
  ModelParams p;
  p.lambda = 0.7;
  p.Gamma = 0.3;
  p.alpha = 0.2;
  const SpectralField f = rhs(c, p);
  CHECK(f.coeff(0).real() == doctest::Approx(-0.07));
  CHECK(oracle::max_diff(f, Modes{{0, -0.07}}) < 1e-16);
  CHECK(rhs(SpectralField(g), p).max_abs_coeff() == 0.0);
}

TEST_CASE("rhs of a cosine matches the hand computation") {
  const TorusGrid g(64);
  for (const ModelParams& p : {ModelParams{}, ModelParams{0.3, 0.0, 0.0, 0.2, 0.5, 0.1},
                               ModelParams{0.1, 0.7, 0.0, 0.0, 1.0, 0.1},
                               ModelParams{0.0, 0.0, 1.3, 0.0, 1.0, 0.1},
                               ModelParams{0.4, -0.6, 0.9, -0.2, 2.0, 0.1}}) {
    for (double a : {0.01, 0.5, 2.0}) {
      const SpectralField f = rhs(cosine(g, 1, a), p);
      CHECK(oracle::max_diff(f, rhs_of_cosine(a, p)) < 1e-13 * std::max(1.0, a * a * a * a));
    }
  }
}

TEST_CASE("nonlocal source and h(u)") {
  const TorusGrid g(64);
  ModelParams p{0.2, 0.3, 0.4, 0.1, 1.0, 0.1};
  const SpectralField u = cosine(g, 1, 0.5);
  const SpectralField h = h_of_u(u, p);
  const SpectralField u2 = product(u, u);
  SpectralField expect = (p.alpha + p.Gamma) * u;
  expect.add_scaled(p.beta / 3.0, product(u2, u));
  expect.add_scaled(p.gamma / 4.0, product(u2, u2));
  CHECK(oracle::max_diff(h, expect) < 1e-15);

  const SpectralField ux = derivative(u);
  SpectralField inner = u2 + 0.5 * product(ux, ux) - h;
  const SpectralField q = -1.0 * helmholtz_inv(derivative(inner));
  CHECK(oracle::max_diff(nonlocal_source(u, p), q) < 1e-15);
}

TEST_CASE("rhs_increment keeps accuracy for tiny increments") {
  const TorusGrid g(64);
  std::mt19937_64 rng(21);
  const ModelParams p{0.2, 0.5, 0.3, 0.1, 1.0, 0.1};
  const SpectralField v = oracle::to_field(oracle::random_modes(rng, 6, 2.0), g);
  const SpectralField e = oracle::to_field(oracle::random_modes(rng, 6, 2.0), g);

  const SpectralField direct = rhs(v + e, p) - rhs(v, p);
  CHECK(oracle::max_diff(rhs_increment(v, e, p), direct) < 1e-12);

  // For e = 1e-12 w the increment is 1e-12 F'(v) w up to O(1e-24).
  const SpectralField tiny = 1e-12 * e;
  const SpectralField inc = rhs_increment(v, tiny, p);
  const SpectralField vx = derivative(v);
  const SpectralField ex = derivative(tiny);
  const SpectralField v2 = product(v, v);
  // Linearization of the model evaluated term by term.
  SpectralField lin = -1.0 * (product(v, ex) + product(tiny, vx));
  lin.add_scaled(-p.Gamma, ex);
  lin.add_scaled(-p.lambda, tiny);
  SpectralField dh = (p.alpha + p.Gamma) * tiny;
  dh.add_scaled(p.beta, product(v2, tiny));
  dh.add_scaled(p.gamma, product(product(v2, v), tiny));
  SpectralField inner = 2.0 * product(v, tiny) + product(vx, ex) - dh;
  lin.add_scaled(-1.0, helmholtz_inv(derivative(inner)));
  CHECK(oracle::max_diff(inc, lin) < 1e-12 * lin.max_abs_coeff());
  CHECK(oracle::max_diff(rhs_increment(v, SpectralField(g), p), SpectralField(g)) == 0.0);
}

TEST_CASE("functional H and the small-data check") {
  const TorusGrid g(32);
  ModelParams p;
  p.alpha = 0.01;
  p.Gamma = -0.02;
  p.beta = 0.3;
  p.gamma = 0.4;
  const SpectralField u = cosine(g, 1, 0.02);
  const double n = std::sqrt(2.0 * 0.01 * 0.01 * 4.0);
  const double expect = 0.03 + n + 0.1 * n * n + 0.1 * n * n * n;
  CHECK(functional_H(u, p, 2.0) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(functional_H(u, p, 1.5), InputError);

  CHECK(small_data_check(u, p, 2.0));
  p.epsilon = expect / p.lambda;
  CHECK(small_data_check(u, p, 2.0));
  p.epsilon = 0.999 * expect;
  CHECK_FALSE(small_data_check(u, p, 2.0));
}

TEST_CASE("local third-order form agrees with the nonlocal form") {
  const TorusGrid g(64);
  std::mt19937_64 rng(23);
  const SpectralField u = oracle::to_field(oracle::random_modes(rng, 5, 2.0), g);
  const ModelParams plain{0.0, 0.4, 0.2, 0.3, 1.0, 0.1};
  CHECK(formulation_residual(u, plain) < 1e-11);
  const ModelParams with_alpha{0.5, 0.4, 0.2, 0.3, 1.0, 0.1};
  CHECK(formulation_residual(u, with_alpha) > 1e-3);
}
