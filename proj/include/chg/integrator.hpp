#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "chg/errors.hpp"
#include "chg/model.hpp"
#include "chg/radius_record.hpp"
#include "chg/spectral.hpp"

namespace chg {

/// Sobolev norm (at s_monitor) above which a trajectory is declared blown up.
inline constexpr double kBlowupThreshold = 1e6;

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 1;
  bool dealias = true;
  double s_monitor = 2.0;

  void validate() const;
  Dealias dealias_mode() const noexcept { return dealias ? Dealias::on : Dealias::off; }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  /// Per recorded time: Sobolev norm at s_monitor, b, H and the measured
  /// radius for sigma = 1. The radius ODE columns stay zero.
  std::vector<RadiusRecord> diagnostics;
  bool dt_within_stability_bound = true;
};

class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& why, std::shared_ptr<const Trajectory> partial = {})
      : Error("blow-up at t=" + std::to_string(time) + ": " + why),
        time_(time),
        partial_(std::move(partial)) {}

  double time() const noexcept { return time_; }
  /// Recorded states up to the last finite step, when available.
  const std::shared_ptr<const Trajectory>& partial() const noexcept { return partial_; }

 private:
  double time_;
  std::shared_ptr<const Trajectory> partial_;
};

/// 1 / (k_max (max|u| + |Gamma|) + lambda)
double stability_bound(const SpectralField& u, const ModelParams& p);

/// Classical RK4 step of u_t = F(u). Throws BlowUpError (time t_now + dt) if
/// the new state is not finite.
SpectralField step_rk4(const SpectralField& u, const ModelParams& p, double dt,
                       double t_now = 0.0, Dealias dealias = Dealias::on);

/// Records t = 0, every record_every steps, and the final time. The last
/// step is shortened when t_end is not a multiple of dt. Throws BlowUpError
/// (with the partial trajectory) on non-finite states or when the monitored
/// Sobolev norm exceeds kBlowupThreshold.
Trajectory integrate(const SpectralField& u0, const ModelParams& p, const SolverConfig& cfg);

struct PicardOptions {
  int quadrature_nodes = 512;
  double C_prime = 1.0;
  Dealias dealias = Dealias::on;
};

struct PicardResult {
  std::vector<double> times;
  /// iterates[n][j] is u_n(times[j]); iterates[0] is the constant datum.
  std::vector<std::vector<SpectralField>> iterates;
  /// ||u_{n+1} - u_n||_{E_T} for n = 0, 1, ...
  std::vector<double> difference_norms;
  /// difference_norms[n] / difference_norms[n-1]
  std::vector<double> ratios;
  /// Index of the first iterate that overflowed, if any.
  std::optional<int> diverged_at;
  double window = 0.0;  ///< T0 / (2^sigma - 1) from the lifespan bounds
};

/// Picard iteration u_{n+1}(t) = u0 + int_0^t F(u_n) on [0, T] with composite
/// trapezoid quadrature. Differences u_{n+1} - u_n are propagated directly
/// through rhs_increment. Throws DomainError unless 0 < T < window.
PicardResult picard_iterate(const SpectralField& u0, const ModelParams& p, double sigma, double s,
                            double T, int n_iters, const PicardOptions& options = {});

}  // namespace chg
