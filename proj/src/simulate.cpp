#include "ael/simulate.hpp"

#include "ael/fft.hpp"
#include "ael/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ael {

std::string_view to_string(InnovationFamily family) {
    switch (family) {
        case InnovationFamily::gaussian: return "gaussian";
        case InnovationFamily::student5: return "student5";
        case InnovationFamily::student10: return "student10";
        case InnovationFamily::exponential: return "exponential";
        case InnovationFamily::chisq5: return "chisq5";
    }
    return "unknown";
}

InnovationFamily parse_family(std::string_view tag) {
    if (tag == "gaussian" || tag == "normal") return InnovationFamily::gaussian;
    if (tag == "student5" || tag == "t5") return InnovationFamily::student5;
    if (tag == "student10" || tag == "t10") return InnovationFamily::student10;
    if (tag == "exponential" || tag == "exp") return InnovationFamily::exponential;
    if (tag == "chisq5" || tag == "chisq") return InnovationFamily::chisq5;
    throw std::invalid_argument("unknown innovation family '" + std::string(tag) + "'");
}

double family_variance(InnovationFamily family) {
    switch (family) {
        case InnovationFamily::gaussian: return 1.0;
        case InnovationFamily::student5: return 5.0 / 3.0;
        case InnovationFamily::student10: return 10.0 / 8.0;
        case InnovationFamily::exponential: return 1.0;
        case InnovationFamily::chisq5: return 10.0;
    }
    throw std::invalid_argument("unknown innovation family");
}

std::string_view to_string(SimulationMethod method) {
    return method == SimulationMethod::circulant_embedding ? "circulant-embedding"
                                                           : "truncated-ma";
}

namespace {

template <class Dist>
void fill(std::vector<double>& out, Dist dist, Engine& rng, double shift) {
    for (auto& x : out) x = dist(rng) - shift;
}

void draw_into(std::vector<double>& out, InnovationFamily family, Engine& rng) {
    switch (family) {
        case InnovationFamily::gaussian:
            fill(out, std::normal_distribution<double>(0.0, 1.0), rng, 0.0);
            break;
        case InnovationFamily::student5:
            fill(out, std::student_t_distribution<double>(5.0), rng, 0.0);
            break;
        case InnovationFamily::student10:
            fill(out, std::student_t_distribution<double>(10.0), rng, 0.0);
            break;
        case InnovationFamily::exponential:
            fill(out, std::exponential_distribution<double>(1.0), rng, 1.0);
            break;
        case InnovationFamily::chisq5:
            fill(out, std::chi_squared_distribution<double>(5.0), rng, 5.0);
            break;
    }
}

// Exact ARFIMA(0,d,0) sample of the given length by circulant embedding.
// Returns false when the embedding has materially negative eigenvalues.
bool circulant_fractional_noise(double d, double sigma2, std::size_t length, Engine& rng,
                                std::vector<double>& out) {
    const std::size_t m = length;  // circulant size is 2m
    const auto gamma = fractional_autocovariance(d, sigma2, m);
    std::vector<std::complex<double>> row(2 * m);
    for (std::size_t h = 0; h <= m; ++h) row[h] = gamma[h];
    for (std::size_t h = 1; h < m; ++h) row[2 * m - h] = gamma[h];

    const auto spectrum = fft::forward(row);
    double lambda_max = 0.0;
    for (const auto& v : spectrum) lambda_max = std::max(lambda_max, v.real());
    std::vector<double> lambda(2 * m);
    for (std::size_t k = 0; k < 2 * m; ++k) {
        const double v = spectrum[k].real();
        if (v < -1e-10 * lambda_max) return false;
        lambda[k] = std::max(v, 0.0);
    }

    // Y_j = sum_k sqrt(lambda_k / 2m) (A_k + i B_k) e^{-2 pi i jk / 2m}; the
    // real part of Y has exactly the target circulant covariance.
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> w(2 * m);
    const double scale = 1.0 / static_cast<double>(2 * m);
    for (std::size_t k = 0; k < 2 * m; ++k) {
        const double a = normal(rng);
        const double b = normal(rng);
        w[k] = std::sqrt(lambda[k] * scale) * std::complex<double>(a, b);
    }
    const auto y = fft::forward(w);
    out.resize(length);
    for (std::size_t t = 0; t < length; ++t) out[t] = y[t].real();
    return true;
}

// Fractional noise via X_t = sum_{j < M} psi_j a_{t-j}, computed as one
// linear convolution by FFT.
void truncated_ma_fractional_noise(double d, double sigma2, InnovationFamily family,
                                   std::size_t length, Engine& rng, std::vector<double>& out) {
    const auto weights = fractional_ma_weights(d, kMaTruncation);
    const std::size_t count = length + kMaTruncation - 1;
    std::vector<double> innov(count);
    draw_into(innov, family, rng);
    const double scale = std::sqrt(sigma2 / family_variance(family));
    for (auto& a : innov) a *= scale;

    std::size_t nfft = 1;
    while (nfft < count + kMaTruncation) nfft <<= 1;
    std::vector<double> a(nfft, 0.0), b(nfft, 0.0);
    std::copy(innov.begin(), innov.end(), a.begin());
    std::copy(weights.begin(), weights.end(), b.begin());
    auto fa = fft::forward_real(a);
    const auto fb = fft::forward_real(b);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    const auto conv = fft::inverse_real(fa, nfft);

    // Output t uses innovations t .. t + M - 1 of the drawn block, i.e. the
    // full window of lags for every retained sample.
    out.resize(length);
    const double inv = 1.0 / static_cast<double>(nfft);
    for (std::size_t t = 0; t < length; ++t) out[t] = conv[t + kMaTruncation - 1] * inv;
}

// Phi(B) Z_t = Theta(B) X_t started from zeros; the first `burn` values are dropped.
std::vector<double> arma_filter(const ParamVector& beta, const std::vector<double>& x,
                                std::size_t burn) {
    const std::size_t p = beta.phi.size();
    const std::size_t q = beta.theta.size();
    std::vector<double> z(x.size(), 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        double v = x[t];
        for (std::size_t j = 1; j <= q && j <= t; ++j) v += beta.theta[j - 1] * x[t - j];
        for (std::size_t i = 1; i <= p && i <= t; ++i) v += beta.phi[i - 1] * z[t - i];
        z[t] = v;
    }
    return {z.begin() + static_cast<std::ptrdiff_t>(burn), z.end()};
}

}  // namespace

std::vector<double> draw_innovations(InnovationFamily family, std::size_t count,
                                     std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("innovation count must be at least 1");
    Engine rng(seed);
    std::vector<double> out(count);
    draw_into(out, family, rng);
    return out;
}

std::vector<double> fractional_autocovariance(double d, double sigma2, std::size_t lags) {
    std::vector<double> g(lags + 1);
    g[0] = sigma2 * std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    for (std::size_t h = 1; h <= lags; ++h) {
        const double hd = static_cast<double>(h);
        g[h] = g[h - 1] * (hd - 1.0 + d) / (hd - d);
    }
    return g;
}

std::vector<double> fractional_ma_weights(double d, std::size_t count) {
    std::vector<double> w(count);
    if (count == 0) return w;
    w[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        const double jd = static_cast<double>(j);
        w[j] = w[j - 1] * (jd - 1.0 + d) / jd;
    }
    return w;
}

TimeSeries simulate_arfima(const ModelSpec& spec, const ParamVector& beta,
                           InnovationFamily family, std::size_t length, std::uint64_t seed) {
    const auto report = validate(spec, beta);
    if (!report.ok()) throw std::invalid_argument(report.describe());
    if (length < 5) throw std::invalid_argument("series length must be at least 5");

    SeriesMeta meta;
    meta.spec = spec;
    meta.beta = beta;
    meta.family = family;
    meta.requested_length = length;
    std::size_t T = length;
    if (T % 2 == 0) {
        --T;
        meta.notices.push_back("even length " + std::to_string(length) + " reduced to " +
                               std::to_string(T) + " so that n = (T-1)/2 is exact");
    }

    Engine rng(seed);
    std::vector<double> core;
    std::size_t burn = std::max<std::size_t>(500, 10 * (spec.p + spec.q));
    bool done = false;
    if (family == InnovationFamily::gaussian) {
        done = circulant_fractional_noise(beta.d, beta.sigma2, T + burn, rng, core);
        meta.method = SimulationMethod::circulant_embedding;
        if (!done) {
            meta.fell_back = true;
            meta.notices.emplace_back(
                "circulant embedding had negative eigenvalues; used truncated MA(inf)");
        }
    }
    if (!done) {
        burn = kMaBurnIn;
        truncated_ma_fractional_noise(beta.d, beta.sigma2, family, T + burn, rng, core);
        meta.method = SimulationMethod::truncated_ma;
    }
    meta.burn_in = burn;

    TimeSeries ts;
    ts.values = arma_filter(beta, core, burn);
    ts.seed = seed;
    ts.meta = std::move(meta);
    return ts;
}

}  // namespace ael
