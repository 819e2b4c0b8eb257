#include "chg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"

namespace chg {
namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kImaginaryResidue = 1e-10;
constexpr int kDirectProductMaxPoints = 512;

void symmetrize(std::vector<Complex>& c) {
  const std::size_t n = c.size();
  const std::size_t half = n / 2;
  c[0] = Complex(c[0].real(), 0.0);
  c[half] = Complex(c[half].real(), 0.0);
  for (std::size_t m = 1; m < half; ++m) {
    const Complex avg = 0.5 * (c[m] + std::conj(c[n - m]));
    c[m] = avg;
    c[n - m] = std::conj(avg);
  }
}

bool is_smooth_size(int n) {
  for (int p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

// ---------------------------------------------------------------- TorusGrid

TorusGrid::TorusGrid(int n_points, double period) : n_(n_points), period_(period) {
  if (n_points < 8 || n_points % 2 != 0) {
    throw InputError("TorusGrid: n_points must be even and >= 8, got " +
                     std::to_string(n_points));
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw InputError("TorusGrid: period must be positive and finite");
  }
}

std::size_t TorusGrid::index_of(int mode) const {
  if (mode < min_mode() || mode > max_mode()) {
    throw InputError("mode " + std::to_string(mode) + " outside band [" +
                     std::to_string(min_mode()) + ", " + std::to_string(max_mode()) + "]");
  }
  return static_cast<std::size_t>(mode >= 0 ? mode : mode + n_);
}

std::vector<double> TorusGrid::points() const {
  std::vector<double> x(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) x[static_cast<std::size_t>(j)] = period_ * j / n_;
  return x;
}

// ------------------------------------------------------------ SpectralField

SpectralField::SpectralField(TorusGrid grid)
    : grid_(grid), coeffs_(static_cast<std::size_t>(grid.n_points())) {}

SpectralField::SpectralField(TorusGrid grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {}

SpectralField SpectralField::from_coeffs(TorusGrid grid, std::vector<Complex> coeffs) {
  if (coeffs.size() != static_cast<std::size_t>(grid.n_points())) {
    throw InputError("from_coeffs: expected " + std::to_string(grid.n_points()) +
                     " coefficients, got " + std::to_string(coeffs.size()));
  }
  SpectralField field(grid, std::move(coeffs));
  if (!field.is_finite()) throw InputError("from_coeffs: non-finite coefficient");
  if (hermitian_defect(field) > kHermitianTolerance) {
    throw SymmetryError("from_coeffs: coefficients are not Hermitian symmetric");
  }
  symmetrize(field.coeffs_);
  return field;
}

SpectralField SpectralField::symmetrized(TorusGrid grid, std::vector<Complex> coeffs) {
  if (coeffs.size() != static_cast<std::size_t>(grid.n_points())) {
    throw InputError("symmetrized: coefficient count does not match grid");
  }
  symmetrize(coeffs);
  return SpectralField(grid, std::move(coeffs));
}

void SpectralField::set_mode(int mode, Complex value) {
  const std::size_t j = grid_.index_of(mode);
  if (mode == 0 || mode == grid_.max_mode()) {
    coeffs_[j] = Complex(value.real(), 0.0);
    return;
  }
  if (-mode < grid_.min_mode()) {
    throw InputError("set_mode: conjugate partner of mode " + std::to_string(mode) +
                     " is outside the band");
  }
  coeffs_[j] = value;
  coeffs_[grid_.index_of(-mode)] = std::conj(value);
}

double SpectralField::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool SpectralField::is_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

void SpectralField::require_same_grid(const SpectralField& other) const {
  if (!(grid_ == other.grid_)) throw InputError("fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  return add_scaled(1.0, other);
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  return add_scaled(-1.0, other);
}

SpectralField& SpectralField::operator*=(double scale) noexcept {
  for (Complex& c : coeffs_) c *= scale;
  return *this;
}

SpectralField& SpectralField::add_scaled(double scale, const SpectralField& other) {
  require_same_grid(other);
  for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] += scale * other.coeffs_[j];
  return *this;
}

void GevreyIndex::validate() const {
  if (!(sigma >= 1.0)) throw InputError("Gevrey index requires sigma >= 1");
  if (!(delta >= 0.0)) throw InputError("Gevrey index requires delta >= 0");
  if (!std::isfinite(s)) throw InputError("Gevrey index requires finite s");
}

// ---------------------------------------------------------------- operators

double hermitian_defect(const SpectralField& field) noexcept {
  const auto c = field.coeffs();
  const double scale = field.max_abs_coeff();
  if (scale == 0.0) return 0.0;
  const std::size_t n = c.size();
  double defect = std::max(std::abs(c[0].imag()), std::abs(c[n / 2].imag()));
  for (std::size_t m = 1; m < n / 2; ++m) {
    defect = std::max(defect, std::abs(c[m] - std::conj(c[n - m])));
  }
  return defect / scale;
}

SpectralField to_spectral(std::span<const double> samples, const TorusGrid& grid) {
  const auto n = static_cast<std::size_t>(grid.n_points());
  if (samples.size() != n) {
    throw InputError("to_spectral: expected " + std::to_string(n) + " samples, got " +
                     std::to_string(samples.size()));
  }
  std::vector<Complex> in(n), out(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(samples[j])) throw InputError("to_spectral: non-finite sample");
    in[j] = samples[j];
  }
  fft::transform(in, out, fft::Direction::forward);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Complex& c : out) c *= inv_n;
  return SpectralField::symmetrized(grid, std::move(out));
}

std::vector<double> to_physical(const SpectralField& field) {
  const std::size_t n = field.size();
  std::vector<Complex> out(n);
  fft::transform(field.coeffs(), out, fft::Direction::backward);
  std::vector<double> values(n);
  double max_real = 0.0;
  double max_imag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    values[j] = out[j].real();
    max_real = std::max(max_real, std::abs(out[j].real()));
    max_imag = std::max(max_imag, std::abs(out[j].imag()));
  }
  if (max_imag > kImaginaryResidue * std::max(1.0, max_real)) {
    throw SymmetryError("to_physical: imaginary residue " + std::to_string(max_imag) +
                        " exceeds threshold");
  }
  return values;
}

SpectralField derivative(const SpectralField& field) {
  const TorusGrid& grid = field.grid();
  std::vector<Complex> out(field.coeffs().begin(), field.coeffs().end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] *= Complex(0.0, grid.wavenumber(grid.mode_at(j)));
  }
  // The Nyquist cosine differentiates to a sine, which is invisible on the grid.
  return SpectralField::symmetrized(grid, std::move(out));
}

SpectralField helmholtz_inv(const SpectralField& field) {
  const TorusGrid& grid = field.grid();
  std::vector<Complex> out(field.coeffs().begin(), field.coeffs().end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double k = grid.wavenumber(grid.mode_at(j));
    out[j] /= 1.0 + k * k;
  }
  return SpectralField::symmetrized(grid, std::move(out));
}

SpectralField gevrey_multiplier(const SpectralField& field, double delta, double sigma) {
  if (!(sigma >= 1.0)) throw InputError("gevrey_multiplier: sigma must be >= 1");
  if (!std::isfinite(delta)) throw InputError("gevrey_multiplier: delta must be finite");
  const TorusGrid& grid = field.grid();
  const double log_max = std::log(std::numeric_limits<double>::max());
  std::vector<Complex> out(field.coeffs().begin(), field.coeffs().end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (out[j] == Complex(0.0, 0.0)) continue;
    const double k = grid.wavenumber(grid.mode_at(j));
    const double exponent = delta * std::pow(1.0 + k * k, 0.5 / sigma);
    const double w = std::exp(exponent);
    Complex scaled = out[j] * w;
    if (!std::isfinite(w) || !std::isfinite(scaled.real()) || !std::isfinite(scaled.imag())) {
      const double log_mag = std::log(std::abs(out[j])) + exponent;
      if (log_mag >= log_max) {
        throw OverflowError("gevrey_multiplier: coefficient of mode " +
                            std::to_string(grid.mode_at(j)) + " overflows (log-magnitude " +
                            std::to_string(log_mag) + ")");
      }
      scaled = std::polar(std::exp(log_mag), std::arg(out[j]));
    }
    out[j] = scaled;
  }
  return SpectralField::symmetrized(grid, std::move(out));
}

double sobolev_norm(const SpectralField& field, double s) {
  return detail::weighted_norm(field, [s](double k) { return s * std::log1p(k * k); });
}

double gevrey_norm(const SpectralField& field, const GevreyIndex& idx) {
  idx.validate();
  return detail::weighted_norm(field,
                               [&idx](double k) { return detail::log_gevrey_weight(k, idx); });
}

double gevrey_norm_bar(const SpectralField& field, const GevreyIndex& idx) {
  idx.validate();
  return detail::weighted_norm(
      field, [&idx](double k) { return detail::log_gevrey_bar_weight(k, idx); });
}

SpectralField product(const SpectralField& f, const SpectralField& g, Dealias dealias) {
  if (!(f.grid() == g.grid())) throw InputError("product: fields live on different grids");
  const int m = detail::padded_size(f.grid().n_points(), 2, dealias);
  std::vector<double> pf = detail::padded_physical(f, m);
  const std::vector<double> pg = detail::padded_physical(g, m);
  for (std::size_t j = 0; j < pf.size(); ++j) pf[j] *= pg[j];
  return detail::from_padded_physical(pf, f.grid());
}

SpectralField product_direct(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw InputError("product_direct: fields live on different grids");
  const TorusGrid& grid = f.grid();
  const int n = grid.n_points();
  if (n > kDirectProductMaxPoints) {
    throw InputError("product_direct: n_points " + std::to_string(n) + " exceeds " +
                     std::to_string(kDirectProductMaxPoints));
  }
  const int half = n / 2;
  // Symmetric expansion over modes -N/2..N/2 with the Nyquist cosine split.
  auto expand = [&](const SpectralField& field) {
    std::vector<Complex> a(static_cast<std::size_t>(n + 1));
    for (int mode = -half + 1; mode < half; ++mode) {
      a[static_cast<std::size_t>(mode + half)] = field.coeff(mode);
    }
    const Complex nyq = 0.5 * field.coeff(half);
    a[0] = nyq;
    a[static_cast<std::size_t>(n)] = nyq;
    return a;
  };
  const std::vector<Complex> a = expand(f);
  const std::vector<Complex> b = expand(g);
  auto at = [half](const std::vector<Complex>& v, int mode) {
    return v[static_cast<std::size_t>(mode + half)];
  };

  // Terms j and mode-j are added as a pair so that swapping f and g gives a
  // bit-identical result.
  auto convolve = [&](int mode) {
    Complex sum(0.0, 0.0);
    const int lo = std::max(-half, mode - half);
    const int hi = std::min(half, mode + half);
    for (int j = lo; j <= hi; ++j) {
      const int partner = mode - j;
      if (j < partner) {
        sum += at(a, j) * at(b, partner) + at(a, partner) * at(b, j);
      } else if (j == partner) {
        sum += at(a, j) * at(b, j);
      }
    }
    return sum;
  };

  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (int mode = -half + 1; mode < half; ++mode) out[grid.index_of(mode)] = convolve(mode);
  out[grid.index_of(half)] = convolve(half) + convolve(-half);
  return SpectralField::symmetrized(grid, std::move(out));
}

SpectralField power(const SpectralField& u, int p, Dealias dealias) {
  if (p < 1) throw InputError("power: exponent must be >= 1");
  if (p == 1) return u;
  const int m = detail::padded_size(u.grid().n_points(), p, dealias);
  std::vector<double> pu = detail::padded_physical(u, m);
  for (double& v : pu) {
    const double base = v;
    for (int i = 1; i < p; ++i) v *= base;
  }
  SpectralField out = detail::from_padded_physical(pu, u.grid());
  if (!out.is_finite()) throw OverflowError("power: u^" + std::to_string(p) + " overflows");
  return out;
}

// ------------------------------------------------------------------ detail

namespace detail {

int padded_size(int n_points, int degree, Dealias dealias) {
  if (dealias == Dealias::off || degree <= 1) return n_points;
  int m = (degree + 1) * n_points / 2 + 1;
  while (m % 2 != 0 || !is_smooth_size(m)) ++m;
  return m;
}

std::vector<double> padded_physical(const SpectralField& field, int m) {
  const TorusGrid& grid = field.grid();
  const int n = grid.n_points();
  const int half = n / 2;
  if (m < n) throw InputError("padded_physical: padded size below grid size");
  std::vector<Complex> spec(static_cast<std::size_t>(m));
  auto slot = [m](int mode) { return static_cast<std::size_t>(mode >= 0 ? mode : mode + m); };
  for (int mode = -half + 1; mode < half; ++mode) spec[slot(mode)] = field.coeff(mode);
  if (m == n) {
    spec[slot(half)] = field.coeff(half);
  } else {
    const Complex nyq = 0.5 * field.coeff(half);
    spec[slot(half)] += nyq;
    spec[slot(-half)] += nyq;
  }
  std::vector<Complex> phys(static_cast<std::size_t>(m));
  fft::transform(spec, phys, fft::Direction::backward);
  std::vector<double> out(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = phys[j].real();
  return out;
}

SpectralField from_padded_physical(std::span<const double> samples, const TorusGrid& grid) {
  const int m = static_cast<int>(samples.size());
  const int n = grid.n_points();
  const int half = n / 2;
  if (m < n) throw InputError("from_padded_physical: too few samples");
  std::vector<Complex> in(samples.begin(), samples.end());
  std::vector<Complex> spec(static_cast<std::size_t>(m));
  fft::transform(in, spec, fft::Direction::forward);
  const double inv_m = 1.0 / static_cast<double>(m);
  auto slot = [m](int mode) { return static_cast<std::size_t>(mode >= 0 ? mode : mode + m); };

  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (int mode = -half + 1; mode < half; ++mode) {
    out[grid.index_of(mode)] = spec[slot(mode)] * inv_m;
  }
  out[grid.index_of(half)] =
      (m == n ? spec[slot(half)] : spec[slot(half)] + spec[slot(-half)]) * inv_m;
  return SpectralField::symmetrized(grid, std::move(out));
}

double log_gevrey_weight(double k, const GevreyIndex& idx) noexcept {
  const double q = 1.0 + k * k;
  return idx.s * std::log1p(k * k) + 2.0 * idx.delta * std::pow(q, 0.5 / idx.sigma);
}

double log_gevrey_bar_weight(double k, const GevreyIndex& idx) noexcept {
  return idx.s * std::log1p(k * k) + 2.0 * idx.delta * std::pow(std::abs(k), 1.0 / idx.sigma);
}

}  // namespace detail

}  // namespace chg
