#pragma once

#include <complex>
#include <span>

namespace hbid::fft {

/// Unnormalized forward DFT, X_k = sum_n x_n exp(-j 2 pi k n / N).
/// Thread-safe: plans are cached per length behind a mutex.
void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// Unnormalized DCT-II, C_k = sum_n x_n cos(pi k (n + 1/2) / N).
void dct2(std::span<const double> in, std::span<double> out);

}  // namespace hbid::fft
