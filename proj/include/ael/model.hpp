// ARFIMA(p,d,q) parameterization, validity checks and spectral density.
//
// The parameter vector is always laid out as (phi_1..phi_p, theta_1..theta_q,
// d, sigma2). Every gradient, covariance matrix and estimating-function row
// in this library uses that order.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace ael {

/// Modulus margin below which a polynomial root counts as on the unit circle.
inline constexpr double kRootTolerance = 1e-6;

struct ModelSpec {
    std::size_t p = 0;  // AR order
    std::size_t q = 0;  // MA order

    /// Number of free parameters, p + q + 2.
    std::size_t dof() const noexcept { return p + q + 2; }
    std::size_t d_index() const noexcept { return p + q; }
    std::size_t sigma2_index() const noexcept { return p + q + 1; }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ParamVector {
    std::vector<double> phi;    // AR coefficients, Phi(z) = 1 - phi_1 z - ...
    std::vector<double> theta;  // MA coefficients, Theta(z) = 1 + theta_1 z + ...
    double d = 0.0;
    double sigma2 = 1.0;

    Eigen::VectorXd packed() const;
    static ParamVector unpack(const ModelSpec& spec, const Eigen::VectorXd& v);

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Outcome of validate(): empty violation list means the parameters are usable.
struct ValidityReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
    std::string describe() const;
};

/// Throws std::invalid_argument when phi/theta sizes disagree with spec.
void check_dimensions(const ModelSpec& spec, const ParamVector& beta);

/// Checks 0 < d < 0.5, sigma2 > 0, AR stationarity, MA invertibility and the
/// absence of a shared AR/MA root. A dimension mismatch is a structural error
/// and throws std::invalid_argument instead of producing a report.
ValidityReport validate(const ModelSpec& spec, const ParamVector& beta);

/// Roots of c_0 + c_1 z + ... + c_m z^m (trailing zero coefficients dropped).
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

/// g(omega) = sigma2/(2 pi) |Theta(e^{-i omega})|^2 / |Phi(e^{-i omega})|^2
///            * (2 sin(omega/2))^{-2d}
/// Defined for omega in (0, 2 pi); omega = 0 is the long-memory pole and is
/// rejected with std::domain_error.
double spectral_density(const ModelSpec& spec, const ParamVector& beta, double omega);

/// Analytic gradient of ln g(omega) with respect to the packed parameters.
Eigen::VectorXd log_spectral_gradient(const ModelSpec& spec, const ParamVector& beta,
                                      double omega);

// Density and log-gradient evaluated together; the whittle module calls this
// once per Fourier frequency.
struct SpectralTerms {
    double density = 0.0;
    Eigen::VectorXd log_gradient;
};
SpectralTerms spectral_terms(const ModelSpec& spec, const ParamVector& beta, double omega);

}  // namespace ael
