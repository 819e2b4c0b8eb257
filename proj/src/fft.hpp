#pragma once

#include <span>

#include "chg/spectral.hpp"

namespace chg::fft {

enum class Direction { forward, backward };

/// Unnormalized complex DFT of length in.size(); in and out must not alias.
/// forward: out_j = sum_n in_n e^{-2 pi i j n / N}; backward uses e^{+...}.
void transform(std::span<const Complex> in, std::span<Complex> out, Direction dir);

}  // namespace chg::fft
