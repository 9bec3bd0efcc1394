#include "ael/spectral.hpp"

#include "ael/fft.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ael {

std::size_t frequency_count(std::size_t T) { return T >= 1 ? (T - 1) / 2 : 0; }

std::vector<double> fourier_grid(std::size_t T) {
    if (T < 5) throw std::invalid_argument("series length must be at least 5");
    const std::size_t n = frequency_count(T);
    std::vector<double> w(n);
    for (std::size_t j = 1; j <= n; ++j)
        w[j - 1] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(T);
    return w;
}

Periodogram Periodogram::from_ordinates(std::size_t T, std::vector<double> ords) {
    Periodogram pg;
    pg.freqs = fourier_grid(T);
    if (ords.size() != pg.freqs.size())
        throw std::invalid_argument("ordinate count does not match floor((T-1)/2)");
    for (double v : ords)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("periodogram ordinates must be finite and non-negative");
    pg.ords = std::move(ords);
    pg.T = T;
    return pg;
}

Periodogram periodogram(std::span<const double> series) {
    const std::size_t T = series.size();
    Periodogram pg;
    pg.freqs = fourier_grid(T);
    pg.T = T;

    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(T);
    std::vector<double> centered(series.begin(), series.end());
    for (auto& v : centered) v -= mean;
    // A constant series is annihilated exactly; skip the transform so every
    // ordinate is a clean zero rather than rounding noise.
    bool constant = true;
    for (double v : series)
        if (v != series[0]) constant = false;

    pg.ords.assign(pg.freqs.size(), 0.0);
    if (constant) return pg;
    const auto bins = fft::forward_real(centered);
    const double norm = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(T));
    for (std::size_t j = 1; j <= pg.ords.size(); ++j) pg.ords[j - 1] = std::norm(bins[j]) * norm;
    return pg;
}

Periodogram periodogram(const TimeSeries& series) { return periodogram(series.values); }

}  // namespace ael
