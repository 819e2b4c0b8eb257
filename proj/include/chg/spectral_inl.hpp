#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "chg/errors.hpp"

namespace chg::detail {

template <class LogWeight>
double weighted_norm(const SpectralField& field, LogWeight&& log_weight) {
  const TorusGrid& grid = field.grid();
  const auto c = field.coeffs();

  double sum = 0.0;
  bool direct_ok = true;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == Complex{}) continue;
    const double a2 = std::norm(c[j]);
    if (a2 == 0.0) {
      direct_ok = false;  // |c|^2 underflows
      break;
    }
    const double w = std::exp(log_weight(grid.wavenumber(grid.mode_at(j))));
    if (!std::isfinite(w)) {
      direct_ok = false;
      break;
    }
    sum += w * a2;
  }
  if (direct_ok && std::isfinite(sum)) return std::sqrt(sum);

  // Terms outside double range: shift by the largest log-term.
  auto log_term = [&](std::size_t j) {
    return log_weight(grid.wavenumber(grid.mode_at(j))) + 2.0 * std::log(std::abs(c[j]));
  };
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] != Complex{}) top = std::max(top, log_term(j));
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] != Complex{}) acc += std::exp(log_term(j) - top);
  }
  const double result = std::exp(0.5 * top) * std::sqrt(acc);
  if (!std::isfinite(result)) {
    throw OverflowError("weighted norm overflows (log-magnitude " + std::to_string(0.5 * top) +
                        ")");
  }
  return result;
}

}  // namespace chg::detail
