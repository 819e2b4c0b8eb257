#pragma once

// Quantitative regularity: measured radius of analyticity, the lifespan
// constants of the local Gevrey existence argument, the E_a norm with its
// auxiliary radius delta(tau), and the global radius ODE
//
//   f^2(t) = 2 (1 + ||u0||_{G^{delta0}})^2 + 2 C int_0^t b^5,   b = 1 + ||u||_{H^s},
//   delta'(t) = -8 C delta(t) f^3(t).

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "chg/integrator.hpp"
#include "chg/model.hpp"
#include "chg/radius_record.hpp"
#include "chg/spectral.hpp"

namespace chg {

/// Coefficients below kNoiseFloor * max|c| are ignored by the radius fit.
inline constexpr double kNoiseFloor = 1e-14;
inline constexpr int kMinFitModes = 8;

struct RadiusEstimate {
  double delta_fit = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS of the log-magnitude fit
  int mode_first = 0;
  int mode_last = 0;
  int modes_count = 0;
};

/// Least-squares fit of log|c_m| = intercept - delta |k_m|^{1/sigma} over
/// modes m >= 2 above the noise floor. Throws InsufficientDecayError when
/// fewer than kMinFitModes modes qualify.
RadiusEstimate estimate_radius(const SpectralField& field, double sigma);

struct MeasuredRadius {
  double delta = 0.0;
  bool resolved = true;
};

/// estimate_radius when enough modes are resolved. Otherwise the field is
/// band-limited down to the noise floor and the slope from the largest
/// coefficient to the floor at the highest resolved wavenumber K,
/// ln(1/kNoiseFloor) / K^{1/sigma}, is reported with resolved = false.
MeasuredRadius measured_radius(const SpectralField& field, double sigma);

struct LifespanBounds {
  double L = 0.0;
  double M = 0.0;
  double R = 0.0;
  double D_sigma = 0.0;
  double T0_min_formula = 0.0;
  double T0_closed_form = 0.0;
  double C_prime = 1.0;
};

/// 1 / (2^sigma - 2 + 2^{-(sigma+1)})
double d_sigma(double sigma);

/// Constants of the fixed-point argument for a datum with
/// ||u0||_{G^1_{sigma,s}} = u0_gevrey_norm, with R = 1 + ||u0||.
LifespanBounds lifespan_bounds(double u0_gevrey_norm, double sigma, double C_prime);

/// T0 (1 - delta)^sigma / (2^sigma - 1)
double holomorphy_window(double T0, double delta, double sigma);

struct DeltaOfTau {
  double value = 0.0;
  bool inside = false;  ///< delta < value < 1
};

/// (1+delta)/2 + 2^{-(2+1/sigma)} ( [(1-delta)^sigma - tau/a]^{1/sigma}
///                                 - [(1-delta)^sigma + (2^{sigma+1}-1) tau/a]^{1/sigma} )
/// Throws DomainError when tau < 0 or (1-delta)^sigma - tau/a < 0.
DeltaOfTau delta_of_tau(double tau, double delta, double sigma, double a);

/// delta = 0.05, 0.10, ..., 0.95
const std::array<double, 19>& ea_delta_grid();

/// sup over the delta grid and the recorded times t < a (1-delta)^sigma / (2^sigma - 1) of
/// ||u(t)||_{G^delta_{sigma,s}} (1-delta)^sigma sqrt(1 - t / (a (1-delta)^sigma)).
/// Throws DomainError if no (t, delta) pair is admissible.
double ea_norm(std::span<const double> times, std::span<const SpectralField> states, double a,
               double sigma, double s);

struct RadiusODEState {
  double delta_theory = 0.5;
  double f_sq = 2.0;
  double C_cal = 1.0;
  double delta0 = 0.5;
  double b_prev = 1.0;   ///< b at the previous advance, for the trapezoid rule
  bool clamped = false;  ///< delta_theory hit the 1e-300 floor
};

RadiusODEState radius_ode_init(const SpectralField& u0, double sigma, double s, double delta0,
                               double C_cal);

/// Advances f^2 by C (b_prev^5 + b_now^5) dt and delta_theory by
/// exp(-8 C dt (f_old^3 + f_new^3) / 2).
RadiusODEState radius_ode_advance(RadiusODEState state, double b_now, double dt);

struct RadiusTrackingConfig {
  double sigma = 1.0;
  double s = 2.0;
  double delta0 = 0.5;
  double C_cal = 1.0;

  void validate() const;
};

/// One RadiusRecord per recorded state; the radius ODE is advanced between
/// consecutive recorded times.
std::vector<RadiusRecord> track_radius(const Trajectory& traj, const ModelParams& p,
                                       const RadiusTrackingConfig& cfg);

struct MeasuredVsTheory {
  int records = 0;
  int violations = 0;         ///< delta_theory > delta_fit
  double worst_margin = 0.0;  ///< min over records of delta_fit - delta_theory
  bool delta_positive = true;
  bool delta_nonincreasing = true;
  bool passed() const noexcept { return violations == 0 && delta_positive && delta_nonincreasing; }
};

MeasuredVsTheory check_measured_vs_theory(std::span<const RadiusRecord> records,
                                          double t_max = 1e300);

/// Smallest C_s_algebra * 2^j (j >= 0) for which the measured-vs-theory
/// check holds on records with t <= t_max. Throws DomainError if none does.
double calibrate_c_cal(const Trajectory& traj, const ModelParams& p, RadiusTrackingConfig cfg,
                       double C_s_algebra, double t_max = 1.0);

struct ContinuityOptions {
  double C_prime = 1.0;
  double budget = 1e-6;  ///< solver-error allowance added to the bound
  int steps = 128;       ///< RK4 steps across the common horizon
};

struct ContinuityReport {
  double horizon = 0.0;  ///< common T
  std::vector<double> distances;
  std::vector<double> bounds;  ///< 2 ||u0^n - u0^inf||_{G^1_{sigma,s}} + budget
  std::vector<bool> within_bound;
  bool strictly_decreasing = true;
  bool decreasing_with_slack = true;  ///< d_{n+1} <= 1.1 d_n
  bool passed() const;
};

/// Integrates every datum and the limit to the common horizon
/// T = min_n 1 / (2^{2 sigma + 8} C' (e^{-sigma} sigma^sigma + 2) (2 + ||u0^n||)^4)
/// and measures ||u^n - u^inf||_{E_T}. A blow-up before T is rethrown as
/// BlowUpError naming the datum.
ContinuityReport continuity_experiment(std::span<const SpectralField> u0_sequence,
                                       const SpectralField& u0_limit, const ModelParams& p,
                                       double sigma, double s, const SolverConfig& cfg,
                                       const ContinuityOptions& options = {});

}  // namespace chg
