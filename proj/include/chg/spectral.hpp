#pragma once

// Periodic fields stored as complex Fourier coefficients, together with the
// Fourier multipliers and weighted norms used throughout the library.
//
// Coefficients are held in FFT order: storage index j holds mode m = j for
// j <= N/2 and m = j - N otherwise, so the band is [-N/2+1, N/2]. The Nyquist
// mode N/2 has no partner in the band; for a real field it is real and is
// treated as the cosine mode cos(N/2 x). Norms are plain mode sums (no 2π
// measure factor).

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace chg {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class TorusGrid {
 public:
  /// n_points must be even and >= 8; period must be positive.
  explicit TorusGrid(int n_points = 256, double period = kTwoPi);

  int n_points() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  int min_mode() const noexcept { return -n_ / 2 + 1; }
  int max_mode() const noexcept { return n_ / 2; }

  int mode_at(std::size_t index) const noexcept {
    const int j = static_cast<int>(index);
    return j <= n_ / 2 ? j : j - n_;
  }
  /// Throws InputError if mode lies outside [min_mode, max_mode].
  std::size_t index_of(int mode) const;
  double wavenumber(int mode) const noexcept { return kTwoPi * mode / period_; }
  double k_max() const noexcept { return wavenumber(max_mode()); }

  /// Collocation points x_j = j * period / n_points.
  std::vector<double> points() const;

  bool operator==(const TorusGrid&) const = default;

 private:
  int n_;
  double period_;
};

class SpectralField {
 public:
  /// Zero field.
  explicit SpectralField(TorusGrid grid);

  /// Validates length, finiteness and Hermitian symmetry (1e-12 relative).
  static SpectralField from_coeffs(TorusGrid grid, std::vector<Complex> coeffs);
  /// Projects arbitrary coefficients onto the real-field subspace instead of
  /// rejecting them. Used by operators whose output is Hermitian only up to
  /// rounding.
  static SpectralField symmetrized(TorusGrid grid, std::vector<Complex> coeffs);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Complex coeff(int mode) const { return coeffs_[grid_.index_of(mode)]; }
  /// Sets mode m and its conjugate partner -m. For m = 0 and the Nyquist
  /// mode only the real part is kept.
  void set_mode(int mode, Complex value);

  double max_abs_coeff() const noexcept;
  bool is_finite() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale) noexcept;
  /// this += scale * other
  SpectralField& add_scaled(double scale, const SpectralField& other);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

 private:
  SpectralField(TorusGrid grid, std::vector<Complex> coeffs);
  void require_same_grid(const SpectralField& other) const;

  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

/// Triple (sigma, delta, s) indexing the space G^delta_{sigma,s}.
struct GevreyIndex {
  double sigma = 1.0;
  double delta = 0.0;
  double s = 0.0;

  /// Throws InputError unless sigma >= 1 and delta >= 0.
  void validate() const;
};

enum class Dealias { on, off };

/// Max relative violation of coeffs[-m] == conj(coeffs[m]) (plus imaginary
/// parts of the zero and Nyquist modes), relative to the largest coefficient.
double hermitian_defect(const SpectralField& field) noexcept;

/// Forward transform normalized by 1/N, so a constant c maps to coeffs[0] = c.
SpectralField to_spectral(std::span<const double> samples, const TorusGrid& grid);

/// Inverse transform. Throws SymmetryError if the imaginary residue exceeds
/// 1e-10 * max(1, max|real part|).
std::vector<double> to_physical(const SpectralField& field);

SpectralField derivative(const SpectralField& field);
/// (1 - d_xx)^{-1}
SpectralField helmholtz_inv(const SpectralField& field);
/// Multiplier exp(delta (1+k^2)^{1/(2 sigma)}); delta may be negative.
SpectralField gevrey_multiplier(const SpectralField& field, double delta, double sigma);

double sobolev_norm(const SpectralField& field, double s);
/// sqrt( sum (1+k^2)^s exp(2 delta (1+k^2)^{1/(2 sigma)}) |c_m|^2 )
double gevrey_norm(const SpectralField& field, const GevreyIndex& idx);
/// Same with the weight exp(2 delta |k|^{1/sigma}).
double gevrey_norm_bar(const SpectralField& field, const GevreyIndex& idx);

/// Pointwise product evaluated on a zero-padded grid; the result is the
/// product of the two trigonometric interpolants projected onto the band.
SpectralField product(const SpectralField& f, const SpectralField& g,
                      Dealias dealias = Dealias::on);
/// Brute-force O(N^2) convolution under the same Nyquist convention as
/// product(). Limited to n_points <= 512.
SpectralField product_direct(const SpectralField& f, const SpectralField& g);
/// u^p on a grid padded for degree p.
SpectralField power(const SpectralField& u, int p, Dealias dealias = Dealias::on);

namespace detail {

/// Smallest even 2^a 3^b 5^c strictly above (degree+1) N / 2, or N when
/// dealiasing is off.
int padded_size(int n_points, int degree, Dealias dealias);

/// Samples of the real trigonometric interpolant of `field` on m points.
std::vector<double> padded_physical(const SpectralField& field, int m);

/// Projects samples on m points back onto the band of `grid`, folding the
/// +/- N/2 components into the stored Nyquist coefficient.
SpectralField from_padded_physical(std::span<const double> samples, const TorusGrid& grid);

/// log of the weight (1+k^2)^s exp(2 delta (1+k^2)^{1/(2 sigma)}).
double log_gevrey_weight(double k, const GevreyIndex& idx) noexcept;
double log_gevrey_bar_weight(double k, const GevreyIndex& idx) noexcept;

/// sqrt(sum_m exp(log_weight(k_m)) |c_m|^2), overflow-safe.
template <class LogWeight>
double weighted_norm(const SpectralField& field, LogWeight&& log_weight);

}  // namespace detail

}  // namespace chg

#include "chg/spectral_inl.hpp"
