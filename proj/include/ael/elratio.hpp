// Empirical likelihood ratio statistics built on the Whittle estimating
// functions, the adjusted (pseudo-observation) variant, and Bartlett factors.
#pragma once

#include "ael/model.hpp"
#include "ael/simulate.hpp"
#include "ael/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ael {

enum class ELStatus { converged, infeasible, max_iter };
std::string_view to_string(ELStatus status);

struct ELSolution {
    Eigen::VectorXd xi;           // Lagrange multiplier
    std::vector<double> weights;  // p_j = 1 / (m (1 + xi' psi_j)); empty unless converged
    double stat = 0.0;            // 2 sum ln(1 + xi' psi_j); +inf when infeasible
    ELStatus status = ELStatus::max_iter;
    int iterations = 0;
    std::size_t m = 0;            // rows used (n for EL, n + 1 for AEL)
    double a_n = 0.0;             // adjustment constant, 0 for plain EL
};

/// Maximizes sum ln(1 + xi' psi_j) over xi by damped Newton iterations on the
/// concave dual (with Owen's pseudo-logarithm below 1/m so every iterate is
/// defined). If 0 is interior to the convex hull of the rows the maximizer is
/// returned with status converged; if the dual is unbounded the status is
/// infeasible and stat is +inf.
///
/// Throws std::invalid_argument if m <= k or a row is not finite.
ELSolution solve_lagrange(const Eigen::MatrixXd& rows, int max_iter = 200);

enum class AnRule { max1_halflog, halflog, fixed };

struct AELConfig {
    AnRule rule = AnRule::max1_halflog;
    double fixed_value = 1.0;  // used by AnRule::fixed

    /// max(1, ln(n)/2), ln(n)/2, or the fixed value.
    double a_n(std::size_t n) const;
};

std::string_view to_string(AnRule rule);
AnRule parse_an_rule(std::string_view tag);

/// Appends the pseudo-row -a_n * (column means of psi).
Eigen::MatrixXd ael_augment(const Eigen::MatrixXd& psi, const AELConfig& cfg);

/// W(beta) = 2 sum_{j<=n} ln(1 + xi' psi_j). Throws std::domain_error for invalid beta.
ELSolution el_stat(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram);

/// W*(beta) on the n + 1 augmented rows. Throws std::domain_error for invalid beta.
ELSolution ael_stat(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram,
                    const AELConfig& cfg = {});

/// Inverse CDF of chi-square with k degrees of freedom.
/// Throws std::invalid_argument unless k >= 1 and 0 < level < 1.
double chisq_quantile(int k, double level);

// ---------------------------------------------------------------------------
// Bartlett correction by mean matching.
//
// The factor is b = k / mean(W) over parametric-bootstrap replicates; the
// corrected test rejects when b * W exceeds the chi-square critical value.

enum class BartlettMode { estimated, theoretical };
std::string_view to_string(BartlettMode mode);

/// k / mean(stats). Throws std::invalid_argument on an empty input.
double mean_matching_factor(std::span<const double> stats, std::size_t k);

struct BartlettRequest {
    ModelSpec spec;
    ParamVector beta_ref;          // truth (theoretical) or fallback estimate (estimated)
    const Periodogram* data = nullptr;  // estimated mode: refit from this periodogram
    InnovationFamily family = InnovationFamily::gaussian;
    std::size_t length = 0;        // T of the bootstrap series
    BartlettMode mode = BartlettMode::theoretical;
    std::size_t reps = 500;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct BartlettFactor {
    double b = 1.0;
    std::size_t used = 0;
    std::size_t dropped = 0;   // replicates whose EL statistic was infeasible
    bool reliable = true;      // false when more than 20% were dropped
    ParamVector beta_gen;      // parameters the bootstrap series were drawn from
    BartlettMode mode = BartlettMode::theoretical;
};

/// Simulates `reps` series from the generating parameters (the true beta in
/// theoretical mode, the Whittle fit of `data` in estimated mode) and
/// evaluates W at those same parameters. Requires reps >= 200.
BartlettFactor bartlett_factors(const BartlettRequest& request);

}  // namespace ael
