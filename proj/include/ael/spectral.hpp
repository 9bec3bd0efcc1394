// Fourier frequencies and mean-corrected periodogram ordinates.
#pragma once

#include "ael/simulate.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ael {

/// Count of Fourier frequencies used for a series of length T: floor((T-1)/2).
std::size_t frequency_count(std::size_t T);

/// omega_j = 2 pi j / T for j = 1..floor((T-1)/2). Requires T >= 5.
std::vector<double> fourier_grid(std::size_t T);

struct Periodogram {
    std::vector<double> freqs;
    std::vector<double> ords;
    std::size_t T = 0;

    std::size_t n() const noexcept { return ords.size(); }

    /// Wraps externally supplied ordinates (synthetic data, tests). The count
    /// must equal frequency_count(T) and every ordinate must be finite and >= 0.
    static Periodogram from_ordinates(std::size_t T, std::vector<double> ords);
};

/// I(omega_j) = |sum_t (z_t - zbar) e^{-i omega_j t}|^2 / (2 pi T), via FFT.
Periodogram periodogram(std::span<const double> series);
Periodogram periodogram(const TimeSeries& series);

}  // namespace ael
