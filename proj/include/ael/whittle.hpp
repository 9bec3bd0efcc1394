// Whittle approximate likelihood, the per-frequency estimating functions and
// the Whittle point estimate with its sandwich covariance.
#pragma once

#include "ael/model.hpp"
#include "ael/spectral.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace ael {

/// Rows psi_j = (I_j / g_j - 1) * d ln g_j / d beta, one per Fourier frequency.
struct PsiMatrix {
    Eigen::MatrixXd rows;  // n x k
    ParamVector beta_at;
};

/// ln L = -sum ln g_j - sum I_j / g_j. Throws std::domain_error if beta is invalid.
double whittle_loglik(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram);

/// Throws std::domain_error if beta is invalid.
PsiMatrix psi_matrix(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram);

/// Gradient of whittle_loglik, which is the column sum of psi_matrix.
Eigen::VectorXd whittle_score(const ModelSpec& spec, const ParamVector& beta,
                              const Periodogram& pgram);

/// Compact search region. The AR/MA box is further intersected with the
/// stationarity/invertibility set during the search.
struct ParameterBox {
    double arma_lo = -0.99;
    double arma_hi = 0.99;
    double d_lo = 0.01;
    double d_hi = 0.49;
    double sigma2_lo = 1e-4;
    double sigma2_hi = 1e4;
};

struct WhittleOptions {
    ParameterBox box;
    std::optional<ParamVector> start;
    int starts = 5;       // quasi-random interior starts (in addition to `start`)
    int max_iter = 200;   // per start
    double fd_step = 1e-5;
};

struct WhittleFit {
    ParamVector beta_hat;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double score_norm = 0.0;   // projected score norm at beta_hat
    double tolerance = 0.0;    // 1e-6 * n
    /// V = A^{-1} Sigma A^{-T}: asymptotic covariance of sqrt(n) (beta_hat - beta).
    std::optional<Eigen::MatrixXd> cov_hat;
    std::string message;
};

/// Maximizes whittle_loglik over the box. sigma2 is concentrated out
/// analytically, the remaining coordinates are searched by a projected
/// Newton method on the analytic score with a finite-difference Hessian,
/// restarted from several quasi-random interior points. Non-convergence is
/// reported through `converged` with the best iterate returned.
/// Throws std::invalid_argument when no starting point is available.
WhittleFit whittle_fit(const ModelSpec& spec, const Periodogram& pgram,
                       const WhittleOptions& options = {});

struct SandwichParts {
    Eigen::MatrixXd a_hat;      // (1/n) sum d psi_j / d beta'
    Eigen::MatrixXd sigma_hat;  // (1/n) sum psi_j psi_j'
    std::optional<Eigen::MatrixXd> v_hat;  // absent when a_hat is singular
};

SandwichParts sandwich_covariance(const ModelSpec& spec, const ParamVector& beta,
                                  const Periodogram& pgram, double fd_step = 1e-5);

}  // namespace ael
