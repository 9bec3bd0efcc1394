// Thin FFTW wrapper. Plans are cached per thread; planner calls are
// serialized because FFTW's planner is not reentrant.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ael::fft {

/// Unnormalized forward DFT, X_k = sum_t x_t exp(-2 pi i k t / n).
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x);

/// Forward DFT of a real sequence; returns the n/2 + 1 non-redundant bins.
std::vector<std::complex<double>> forward_real(std::span<const double> x);

/// Unnormalized inverse of forward_real: returns n real samples scaled by n.
std::vector<double> inverse_real(std::span<const std::complex<double>> half, std::size_t n);

}  // namespace ael::fft
