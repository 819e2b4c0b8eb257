#pragma once

namespace chg {

/// Per-time regularity diagnostics, one row of trajectory.csv.
struct RadiusRecord {
  double t = 0.0;
  double sobolev_s = 0.0;                    ///< ||u(t)||_{H^s}
  double gevrey_norm_at_delta_theory = 0.0;  ///< ||u(t)||_{G^{delta_theory}_{sigma,s}}
  double delta_fit = 0.0;                    ///< measured radius
  double delta_theory = 0.0;                 ///< radius ODE lower bound
  double f_val = 0.0;
  double b_val = 0.0;  ///< 1 + ||u(t)||_{H^s}
  double H_val = 0.0;
  /// False when too few modes were resolved for a decay fit and delta_fit
  /// holds the noise-floor resolution bound instead. Not written to CSV.
  bool delta_fit_resolved = true;
  /// delta_theory reached the 1e-300 floor. Not written to CSV.
  bool delta_theory_clamped = false;
};

}  // namespace chg
