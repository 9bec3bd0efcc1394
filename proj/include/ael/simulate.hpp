// ARFIMA sample paths under the supported innovation laws.
#pragma once

#include "ael/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ael {

/// Centered innovation laws. Raw variances: 1, 5/3, 10/8, 1, 10.
enum class InnovationFamily { gaussian, student5, student10, exponential, chisq5 };

std::string_view to_string(InnovationFamily family);
/// Accepts the canonical names ("gaussian", "student5", "student10",
/// "exponential", "chisq5") plus a few aliases ("normal", "t5", "t10", "exp",
/// "chisq"). Unknown tags throw std::invalid_argument.
InnovationFamily parse_family(std::string_view tag);
double family_variance(InnovationFamily family);

/// i.i.d. mean-zero draws from `family` (exp(1) draws minus 1, chi2_5 draws
/// minus 5). Deterministic in `seed`.
std::vector<double> draw_innovations(InnovationFamily family, std::size_t count,
                                     std::uint64_t seed);

enum class SimulationMethod { circulant_embedding, truncated_ma };
std::string_view to_string(SimulationMethod method);

struct SeriesMeta {
    ModelSpec spec;
    ParamVector beta;
    InnovationFamily family = InnovationFamily::gaussian;
    SimulationMethod method = SimulationMethod::circulant_embedding;
    bool fell_back = false;        // circulant embedding rejected, MA(inf) used instead
    std::size_t requested_length = 0;
    std::size_t burn_in = 0;
    std::vector<std::string> notices;
};

struct TimeSeries {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::optional<SeriesMeta> meta;

    std::size_t size() const noexcept { return values.size(); }
};

/// Number of MA(inf) weights kept by the truncated fallback generator.
inline constexpr std::size_t kMaTruncation = 10000;
/// ARMA burn-in used on the truncated MA(inf) path.
inline constexpr std::size_t kMaBurnIn = 1000;

/// Autocovariances gamma_0..gamma_{lags} of ARFIMA(0,d,0) with innovation
/// variance sigma2.
std::vector<double> fractional_autocovariance(double d, double sigma2, std::size_t lags);

/// Weights of (1 - B)^{-d}: psi_0 = 1, psi_j = psi_{j-1} (j - 1 + d) / j.
std::vector<double> fractional_ma_weights(double d, std::size_t count);

/// Simulates Phi(B)(1-B)^d Z_t = Theta(B) a_t with Var(a_t) = beta.sigma2.
///
/// Gaussian innovations use exact circulant embedding for the fractional
/// core; the other laws always use a truncated MA(inf) representation so the
/// innovation distribution is preserved. The ARMA filter then runs with a
/// discarded burn-in. An even `length` is reduced by one (recorded in
/// meta.notices) so that the number of Fourier frequencies is (T-1)/2.
///
/// Throws std::invalid_argument for invalid parameters or length < 5.
TimeSeries simulate_arfima(const ModelSpec& spec, const ParamVector& beta,
                           InnovationFamily family, std::size_t length, std::uint64_t seed);

}  // namespace ael
