#include "chg/model.hpp"

#include <algorithm>
#include <cmath>

#include "chg/errors.hpp"

namespace chg {
namespace {

int nonlinear_degree(const ModelParams& p) {
  if (p.gamma != 0.0) return 4;
  if (p.beta != 0.0) return 3;
  return 2;
}

struct NonlinearTerms {
  SpectralField advection;  // u u_x
  SpectralField inner;      // -h(u) + u^2 + u_x^2 / 2
};

NonlinearTerms nonlinear_terms(const SpectralField& u, const ModelParams& p, Dealias dealias) {
  const TorusGrid& grid = u.grid();
  const int m = detail::padded_size(grid.n_points(), nonlinear_degree(p), dealias);
  const SpectralField ux = derivative(u);
  const std::vector<double> pu = detail::padded_physical(u, m);
  const std::vector<double> pux = detail::padded_physical(ux, m);

  std::vector<double> adv(pu.size()), inner(pu.size());
  const double b3 = p.beta / 3.0;
  const double g4 = p.gamma / 4.0;
  for (std::size_t j = 0; j < pu.size(); ++j) {
    const double v = pu[j];
    const double v2 = v * v;
    adv[j] = v * pux[j];
    inner[j] = v2 + 0.5 * pux[j] * pux[j] - (b3 * v2 * v + g4 * v2 * v2);
  }
  SpectralField inner_field = detail::from_padded_physical(inner, grid);
  inner_field.add_scaled(-(p.alpha + p.Gamma), u);
  return {detail::from_padded_physical(adv, grid), std::move(inner_field)};
}

SpectralField source_from_inner(const SpectralField& inner) {
  SpectralField q = helmholtz_inv(derivative(inner));
  q *= -1.0;
  return q;
}

void require_finite(const SpectralField& f, const char* what) {
  if (!f.is_finite()) throw OverflowError(std::string(what) + ": non-finite result");
}

}  // namespace

void ModelParams::validate() const {
  for (double v : {alpha, beta, gamma, Gamma, lambda, epsilon}) {
    if (!std::isfinite(v)) throw InputError("ModelParams: coefficients must be finite");
  }
  if (!(lambda > 0.0)) throw InputError("ModelParams: lambda must be positive");
  if (!(epsilon > 0.0)) throw InputError("ModelParams: epsilon must be positive");
}

SpectralField h_of_u(const SpectralField& u, const ModelParams& p, Dealias dealias) {
  const TorusGrid& grid = u.grid();
  SpectralField h = (p.alpha + p.Gamma) * u;
  if (p.beta != 0.0 || p.gamma != 0.0) {
    const int m = detail::padded_size(grid.n_points(), nonlinear_degree(p), dealias);
    std::vector<double> pu = detail::padded_physical(u, m);
    for (double& v : pu) {
      const double v3 = v * v * v;
      v = p.beta / 3.0 * v3 + p.gamma / 4.0 * v3 * v;
    }
    h += detail::from_padded_physical(pu, grid);
  }
  require_finite(h, "h_of_u");
  return h;
}

SpectralField nonlocal_source(const SpectralField& u, const ModelParams& p, Dealias dealias) {
  SpectralField q = source_from_inner(nonlinear_terms(u, p, dealias).inner);
  require_finite(q, "nonlocal_source");
  return q;
}

SpectralField rhs(const SpectralField& u, const ModelParams& p, Dealias dealias) {
  NonlinearTerms terms = nonlinear_terms(u, p, dealias);
  SpectralField f = source_from_inner(terms.inner);
  f -= terms.advection;
  f.add_scaled(-p.Gamma, derivative(u));
  f.add_scaled(-p.lambda, u);
  require_finite(f, "rhs");
  return f;
}

SpectralField rhs_increment(const SpectralField& v, const SpectralField& e, const ModelParams& p,
                            Dealias dealias) {
  if (!(v.grid() == e.grid())) throw InputError("rhs_increment: grid mismatch");
  const TorusGrid& grid = v.grid();
  const int m = detail::padded_size(grid.n_points(), nonlinear_degree(p), dealias);
  const SpectralField vx = derivative(v);
  const SpectralField ex = derivative(e);
  const std::vector<double> pv = detail::padded_physical(v, m);
  const std::vector<double> pe = detail::padded_physical(e, m);
  const std::vector<double> pvx = detail::padded_physical(vx, m);
  const std::vector<double> pex = detail::padded_physical(ex, m);

  std::vector<double> adv(pv.size()), inner(pv.size());
  const double b3 = p.beta / 3.0;
  const double g4 = p.gamma / 4.0;
  for (std::size_t j = 0; j < pv.size(); ++j) {
    const double a = pv[j];
    const double d = pe[j];
    const double u = a + d;
    const double ux = pvx[j] + pex[j];
    // u u_x - v v_x = e u_x + v e_x
    adv[j] = d * ux + a * pex[j];
    // u^2 - v^2 = e (u + v); u_x^2 - v_x^2 = e_x (u_x + v_x)
    double w = d * (u + a) + 0.5 * pex[j] * (ux + pvx[j]);
    // u^3 - v^3 = e (u^2 + u v + v^2); u^4 - v^4 = e (u + v)(u^2 + v^2)
    if (b3 != 0.0) w -= b3 * d * (u * u + u * a + a * a);
    if (g4 != 0.0) w -= g4 * d * (u + a) * (u * u + a * a);
    inner[j] = w;
  }
  SpectralField inner_field = detail::from_padded_physical(inner, grid);
  inner_field.add_scaled(-(p.alpha + p.Gamma), e);

  SpectralField f = source_from_inner(inner_field);
  f -= detail::from_padded_physical(adv, grid);
  f.add_scaled(-p.Gamma, ex);
  f.add_scaled(-p.lambda, e);
  require_finite(f, "rhs_increment");
  return f;
}

double functional_H(const SpectralField& u, const ModelParams& p, double s) {
  if (!(s > 1.5)) throw InputError("functional_H: requires s > 3/2");
  const double n = sobolev_norm(u, s);
  return std::abs(p.alpha) + std::abs(p.Gamma) + n + std::abs(p.beta) / 3.0 * n * n +
         std::abs(p.gamma) / 4.0 * n * n * n;
}

bool small_data_check(const SpectralField& u0, const ModelParams& p, double s) {
  return functional_H(u0, p, s) <= p.lambda * p.epsilon;
}

double formulation_residual(const SpectralField& u, const ModelParams& p) {
  const TorusGrid& grid = u.grid();
  const SpectralField f = rhs(u, p);
  const SpectralField lifted = f - derivative(derivative(f));

  const SpectralField ux = derivative(u);
  const SpectralField uxx = derivative(ux);
  const SpectralField uxxx = derivative(uxx);
  const int degree = p.gamma != 0.0 ? 4 : (p.beta != 0.0 ? 3 : 2);
  const int m = detail::padded_size(grid.n_points(), degree, Dealias::on);
  const std::vector<double> pu = detail::padded_physical(u, m);
  const std::vector<double> pux = detail::padded_physical(ux, m);
  const std::vector<double> puxx = detail::padded_physical(uxx, m);
  const std::vector<double> puxxx = detail::padded_physical(uxxx, m);

  // (1 - d_xx) u_t = -3 u u_x - lambda (u - u_xx) + 2 u_x u_xx + u u_xxx
  //                  + alpha u + beta u^2 u_x + gamma u^3 u_x + Gamma u_xxx
  std::vector<double> nonlinear(pu.size());
  for (std::size_t j = 0; j < pu.size(); ++j) {
    const double a = pu[j];
    nonlinear[j] = -3.0 * a * pux[j] + 2.0 * pux[j] * puxx[j] + a * puxxx[j] +
                   p.beta * a * a * pux[j] + p.gamma * a * a * a * pux[j];
  }
  SpectralField local = detail::from_padded_physical(nonlinear, grid);
  local.add_scaled(-p.lambda, u);
  local.add_scaled(p.lambda, uxx);
  local.add_scaled(p.alpha, u);
  local.add_scaled(p.Gamma, uxxx);

  const std::vector<double> diff = to_physical(lifted - local);
  double worst = 0.0;
  for (double d : diff) worst = std::max(worst, std::abs(d));
  return worst;
}

}  // namespace chg
