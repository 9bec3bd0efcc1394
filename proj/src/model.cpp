#include "ael/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ael {

Eigen::VectorXd ParamVector::packed() const {
    Eigen::VectorXd v(phi.size() + theta.size() + 2);
    std::size_t i = 0;
    for (double x : phi) v[i++] = x;
    for (double x : theta) v[i++] = x;
    v[i++] = d;
    v[i] = sigma2;
    return v;
}

ParamVector ParamVector::unpack(const ModelSpec& spec, const Eigen::VectorXd& v) {
    if (static_cast<std::size_t>(v.size()) != spec.dof()) {
        throw std::invalid_argument("parameter vector has " + std::to_string(v.size()) +
                                    " entries, model needs " + std::to_string(spec.dof()));
    }
    ParamVector b;
    b.phi.assign(v.data(), v.data() + spec.p);
    b.theta.assign(v.data() + spec.p, v.data() + spec.p + spec.q);
    b.d = v[spec.d_index()];
    b.sigma2 = v[spec.sigma2_index()];
    return b;
}

std::string ValidityReport::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

void check_dimensions(const ModelSpec& spec, const ParamVector& beta) {
    if (beta.phi.size() != spec.p || beta.theta.size() != spec.q) {
        std::ostringstream os;
        os << "parameter dimensions (" << beta.phi.size() << " AR, " << beta.theta.size()
           << " MA) do not match model orders (p=" << spec.p << ", q=" << spec.q << ")";
        throw std::invalid_argument(os.str());
    }
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    std::size_t m = coeffs.size();
    while (m > 0 && coeffs[m - 1] == 0.0) --m;
    if (m <= 1) return {};
    const std::size_t deg = m - 1;
    const double lead = coeffs[deg];
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (std::size_t i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs[i] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<std::complex<double>> roots(deg);
    for (std::size_t i = 0; i < deg; ++i) roots[i] = es.eigenvalues()[i];
    return roots;
}

namespace {

std::vector<double> ar_polynomial(const ParamVector& beta) {
    std::vector<double> c{1.0};
    for (double x : beta.phi) c.push_back(-x);
    return c;
}

std::vector<double> ma_polynomial(const ParamVector& beta) {
    std::vector<double> c{1.0};
    for (double x : beta.theta) c.push_back(x);
    return c;
}

bool all_finite(const ParamVector& beta) {
    auto fin = [](double x) { return std::isfinite(x); };
    for (double x : beta.phi)
        if (!fin(x)) return false;
    for (double x : beta.theta)
        if (!fin(x)) return false;
    return fin(beta.d) && fin(beta.sigma2);
}

void check_omega(double omega) {
    if (!(omega > 0.0 && omega < 2.0 * std::numbers::pi)) {
        throw std::domain_error("spectral density is evaluated on (0, 2*pi); omega = 0 is a pole");
    }
}

}  // namespace

ValidityReport validate(const ModelSpec& spec, const ParamVector& beta) {
    check_dimensions(spec, beta);
    ValidityReport report;
    if (!all_finite(beta)) {
        report.violations.emplace_back("parameters must be finite");
        return report;
    }
    if (!(beta.d > 0.0 && beta.d < 0.5)) report.violations.emplace_back("d must lie in (0, 0.5)");
    if (!(beta.sigma2 > 0.0)) report.violations.emplace_back("sigma2 must be positive");

    const auto ar_roots = polynomial_roots(ar_polynomial(beta));
    const auto ma_roots = polynomial_roots(ma_polynomial(beta));
    for (const auto& r : ar_roots) {
        if (std::abs(r) <= 1.0 + kRootTolerance) {
            report.violations.emplace_back("AR root on or inside the unit circle");
            break;
        }
    }
    for (const auto& r : ma_roots) {
        if (std::abs(r) <= 1.0 + kRootTolerance) {
            report.violations.emplace_back("MA root on or inside the unit circle");
            break;
        }
    }
    bool shared = false;
    for (const auto& a : ar_roots)
        for (const auto& b : ma_roots)
            if (std::abs(a - b) <= kRootTolerance * std::max(1.0, std::abs(a))) shared = true;
    if (shared) report.violations.emplace_back("AR and MA polynomials share a common root");
    return report;
}

SpectralTerms spectral_terms(const ModelSpec& spec, const ParamVector& beta, double omega) {
    check_dimensions(spec, beta);
    check_omega(omega);

    // Phi(e^{-i omega}) and Theta(e^{-i omega}) with powers of e^{-i omega}
    // accumulated once.
    const std::complex<double> unit = std::polar(1.0, -omega);
    std::vector<std::complex<double>> powers(std::max(spec.p, spec.q) + 1);
    powers[0] = 1.0;
    for (std::size_t i = 1; i < powers.size(); ++i) powers[i] = powers[i - 1] * unit;

    std::complex<double> ar = 1.0;
    for (std::size_t i = 0; i < spec.p; ++i) ar -= beta.phi[i] * powers[i + 1];
    std::complex<double> ma = 1.0;
    for (std::size_t i = 0; i < spec.q; ++i) ma += beta.theta[i] * powers[i + 1];

    const double ar2 = std::norm(ar);
    const double ma2 = std::norm(ma);
    const double two_sin = 2.0 * std::sin(0.5 * omega);
    const double log_two_sin = std::log(two_sin);

    SpectralTerms out;
    out.density = beta.sigma2 / (2.0 * std::numbers::pi) * ma2 / ar2 *
                  std::exp(-2.0 * beta.d * log_two_sin);

    out.log_gradient.resize(static_cast<Eigen::Index>(spec.dof()));
    for (std::size_t i = 0; i < spec.p; ++i)
        out.log_gradient[i] = 2.0 * std::real(std::conj(ar) * powers[i + 1]) / ar2;
    for (std::size_t i = 0; i < spec.q; ++i)
        out.log_gradient[spec.p + i] = 2.0 * std::real(std::conj(ma) * powers[i + 1]) / ma2;
    out.log_gradient[spec.d_index()] = -2.0 * log_two_sin;
    out.log_gradient[spec.sigma2_index()] = 1.0 / beta.sigma2;
    return out;
}

double spectral_density(const ModelSpec& spec, const ParamVector& beta, double omega) {
    return spectral_terms(spec, beta, omega).density;
}

Eigen::VectorXd log_spectral_gradient(const ModelSpec& spec, const ParamVector& beta,
                                      double omega) {
    return spectral_terms(spec, beta, omega).log_gradient;
}

}  // namespace ael
