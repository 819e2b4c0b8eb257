// Randomized properties over generated fields. Each property runs on many
// draws; a failure reports the trial index so it can be replayed.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "chg/model.hpp"
#include "chg/spectral.hpp"
#include "oracles.hpp"

using namespace chg;

namespace {

constexpr int kTrials = 100;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  TorusGrid grid() {
    static constexpr int sizes[] = {16, 32, 48, 64};
    return TorusGrid(sizes[integer(0, 3)], uniform(0.5, 3.0) * kTwoPi);
  }
  /// Field on modes |m| <= band with random amplitude and decay.
  SpectralField field(const TorusGrid& g, int band) {
    return uniform(0.01, 2.0) * oracle::to_field(oracle::random_modes(rng, band, uniform(0.5, 3.0)), g);
  }
  GevreyIndex index() { return {uniform(1.0, 3.0), uniform(0.0, 1.0), uniform(-1.0, 3.0)}; }
};

void for_all(std::uint64_t seed, const std::function<void(Gen&)>& property) {
  Gen gen(seed);
  for (int trial = 0; trial < kTrials; ++trial) {
    CAPTURE(trial);
    property(gen);
  }
}

double norm_scale(const SpectralField& f) { return std::max(1.0, f.max_abs_coeff()); }

}  // namespace

TEST_CASE("physical round trip and Parseval") {
  for_all(101, [](Gen& gen) {
    const TorusGrid g = gen.grid();
    const SpectralField f = gen.field(g, g.n_points() / 2 - 1);
    const auto x = to_physical(f);
    CHECK(oracle::max_diff(to_spectral(x, g), f) < 1e-14 * norm_scale(f));
    double mean_sq = 0.0;
    for (double v : x) mean_sq += v * v / x.size();
    CHECK(std::sqrt(mean_sq) == doctest::Approx(sobolev_norm(f, 0.0)).epsilon(1e-12));
  });
}

TEST_CASE("Leibniz rule for band-limited products") {
  for_all(102, [](Gen& gen) {
    const TorusGrid g = gen.grid();
    const int band = g.n_points() / 4 - 1;
    const SpectralField f = gen.field(g, band);
    const SpectralField h = gen.field(g, band);
    const SpectralField lhs = derivative(product(f, h));
    const SpectralField rhs = product(derivative(f), h) + product(f, derivative(h));
    CHECK(oracle::max_diff(lhs, rhs) < 1e-12 * norm_scale(lhs));
  });
}

TEST_CASE("product is commutative and associative below a third of the band") {
  for_all(103, [](Gen& gen) {
    const TorusGrid g = gen.grid();
    const int band = g.n_points() / 6;
    const SpectralField a = gen.field(g, band);
    const SpectralField b = gen.field(g, band);
    const SpectralField c = gen.field(g, band);
    CHECK(oracle::max_diff(product(a, b), product(b, a)) < 1e-14 * norm_scale(a) * norm_scale(b));
    const SpectralField l = product(product(a, b), c);
    const SpectralField r = product(a, product(b, c));
    CHECK(oracle::max_diff(l, r) < 1e-12 * norm_scale(l));
  });
}

TEST_CASE("Helmholtz inverse undoes 1 - d_xx") {
  for_all(104, [](Gen& gen) {
    const TorusGrid g = gen.grid();
    const SpectralField u = gen.field(g, g.n_points() / 2 - 1);
    const SpectralField back = helmholtz_inv(u - derivative(derivative(u)));
    CHECK(oracle::max_diff(back, u) < 1e-12 * norm_scale(u));
  });
}

TEST_CASE("norms grow with each index and obey the triangle inequality") {
  for_all(105, [](Gen& gen) {
    const TorusGrid g = gen.grid();
    const SpectralField f = gen.field(g, g.n_points() / 4);
    const SpectralField h = gen.field(g, g.n_points() / 4);
    const GevreyIndex idx = gen.index();
    const double base = gevrey_norm(f, idx);
    CHECK(gevrey_norm(f, {idx.sigma, idx.delta + 0.1, idx.s}) >= base);
    CHECK(gevrey_norm(f, {idx.sigma, idx.delta, idx.s + 0.5}) >= base);
    CHECK(gevrey_norm(f, {idx.sigma + 0.5, idx.delta, idx.s}) <= base * (1.0 + 1e-14));
    CHECK(gevrey_norm(f + h, idx) <= (base + gevrey_norm(h, idx)) * (1.0 + 1e-14));
    const double lam = gen.uniform(-3.0, 3.0);
    CHECK(gevrey_norm(lam * f, idx) == doctest::Approx(std::abs(lam) * base).epsilon(1e-13));
  });
}

TEST_CASE("Gevrey multiplier turns Gevrey norms into Sobolev norms") {
  for_all(106, [](Gen& gen) {
    const TorusGrid g(32);
    const SpectralField f = gen.field(g, 8);
    const GevreyIndex idx = gen.index();
    const SpectralField e = gevrey_multiplier(f, idx.delta, idx.sigma);
    CHECK(sobolev_norm(e, idx.s) == doctest::Approx(gevrey_norm(f, idx)).epsilon(1e-13));
    CHECK(oracle::max_diff(gevrey_multiplier(e, -idx.delta, idx.sigma), f) < 1e-13 * norm_scale(f));
  });
}

TEST_CASE("rhs increments telescope") {
  for_all(107, [](Gen& gen) {
    const TorusGrid g(32);
    const ModelParams p{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1),
                        gen.uniform(-1, 1), gen.uniform(0.1, 2.0), 0.1};
    const SpectralField v = 0.3 * gen.field(g, 5);
    const SpectralField e1 = 0.1 * gen.field(g, 5);
    const SpectralField e2 = 0.1 * gen.field(g, 5);
    const SpectralField whole = rhs_increment(v, e1 + e2, p);
    const SpectralField split = rhs_increment(v, e1, p) + rhs_increment(v + e1, e2, p);
    CHECK(oracle::max_diff(whole, split) < 1e-12 * norm_scale(whole));
    CHECK(oracle::max_diff(whole, rhs(v + e1 + e2, p) - rhs(v, p)) < 1e-12 * norm_scale(whole));
  });
}

TEST_CASE("damping alone scales the rhs linearly") {
  for_all(108, [](Gen& gen) {
    const TorusGrid g(32);
    const SpectralField u = gen.field(g, 6);
    ModelParams a, b;
    a.lambda = gen.uniform(0.1, 3.0);
    b.lambda = a.lambda + 1.0;
    CHECK(oracle::max_diff(rhs(u, a) - rhs(u, b), u) < 1e-13 * norm_scale(u));
  });
}
