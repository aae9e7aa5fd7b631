#pragma once

#include "wcsync/types.hpp"

namespace wcsync::fft {

// Unnormalized forward DFT: X[k] = sum_n x[n] exp(-j 2 pi k n / N).
CVec forward(std::span<const cplx> x);

// Inverse DFT with 1/N scaling, so inverse(forward(x)) == x.
CVec inverse(std::span<const cplx> X);

// Baseband frequency (Hz) of bin k in an n-point DFT, mapped to [-fs/2, fs/2).
double bin_frequency(std::size_t k, std::size_t n, double sample_rate) noexcept;

std::size_t next_pow2(std::size_t n) noexcept;

}  // namespace wcsync::fft
