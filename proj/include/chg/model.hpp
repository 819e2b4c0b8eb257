#pragma once

// Right-hand side of the weakly dissipative Camassa-Holm equation in its
// nonlocal form
//
//   u_t + (u + Gamma) u_x + lambda u = Q,
//   Q = -(1 - d_xx)^{-1} d_x ( -h(u) + u^2 + u_x^2 / 2 ),
//   h(u) = (alpha + Gamma) u + beta u^3 / 3 + gamma u^4 / 4,
//
// and the small-data functional H that controls global existence.

#include "chg/spectral.hpp"

namespace chg {

struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double Gamma = 0.0;
  double lambda = 1.0;
  double epsilon = 0.1;  ///< smallness threshold for H0 <= lambda * epsilon

  void validate() const;
};

struct StateFunctionals {
  double H0 = 0.0;
  double H_t = 0.0;
  double s = 2.0;
};

SpectralField h_of_u(const SpectralField& u, const ModelParams& p,
                     Dealias dealias = Dealias::on);
SpectralField nonlocal_source(const SpectralField& u, const ModelParams& p,
                              Dealias dealias = Dealias::on);
/// F(u) = -(u + Gamma) u_x - lambda u + Q(u)
SpectralField rhs(const SpectralField& u, const ModelParams& p, Dealias dealias = Dealias::on);

/// F(v + e) - F(v), evaluated through the factored differences
/// (u^2 - v^2 = e (u + v), ...) so the result keeps full relative accuracy
/// when e is many orders of magnitude smaller than v.
SpectralField rhs_increment(const SpectralField& v, const SpectralField& e, const ModelParams& p,
                            Dealias dealias = Dealias::on);

/// |alpha| + |Gamma| + n + |beta| n^2 / 3 + |gamma| n^3 / 4 with n = ||u||_{H^s}.
/// Requires s > 3/2.
double functional_H(const SpectralField& u, const ModelParams& p, double s);

/// functional_H(u0) <= lambda * epsilon (boundary included).
bool small_data_check(const SpectralField& u0, const ModelParams& p, double s);

/// Max-norm of (1 - d_xx) rhs(u) minus the right-hand side of the local
/// third-order form solved for (1 - d_xx) u_t. Nonzero when alpha != 0.
double formulation_residual(const SpectralField& u, const ModelParams& p);

}  // namespace chg
