#include "ael/model.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace ael;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;

bool mentions(const ValidityReport& r, const std::string& text) {
    for (const auto& v : r.violations)
        if (v.find(text) != std::string::npos) return true;
    return false;
}
}  // namespace

TEST_CASE("validate accepts ARFIMA(1,d,1) inside the region") {
    const ModelSpec spec{1, 1};
    const ParamVector b{{0.5}, {0.3}, 0.2, 1.0};
    CHECK(validate(spec, b).ok());
}

TEST_CASE("validate rejects d outside (0, 0.5)") {
    const ModelSpec spec{0, 0};
    auto r = validate(spec, {{}, {}, 0.5, 1.0});
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "d must lie in (0, 0.5)"));
    CHECK_FALSE(validate(spec, {{}, {}, 0.0, 1.0}).ok());
    CHECK_FALSE(validate(spec, {{}, {}, -0.1, 1.0}).ok());
}

TEST_CASE("validate rejects a unit AR root") {
    auto r = validate({1, 0}, {{1.0}, {}, 0.2, 1.0});
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "AR root"));
}

TEST_CASE("validate rejects non-invertible MA and non-positive variance") {
    CHECK(mentions(validate({0, 1}, {{}, {1.2}, 0.2, 1.0}), "MA root"));
    CHECK(mentions(validate({0, 0}, {{}, {}, 0.2, 0.0}), "sigma2"));
    CHECK(mentions(validate({0, 0}, {{}, {}, 0.2, -1.0}), "sigma2"));
}

TEST_CASE("validate rejects a shared AR/MA root") {
    // Phi(z) = 1 - 0.5 z and Theta(z) = 1 - 0.5 z share z = 2.
    auto r = validate({1, 1}, {{0.5}, {-0.5}, 0.2, 1.0});
    CHECK(mentions(r, "common root"));
}

TEST_CASE("dimension mismatch throws") {
    CHECK_THROWS_AS(validate({1, 0}, {{}, {}, 0.2, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(spectral_density({0, 1}, {{}, {}, 0.2, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("polynomial roots of 1 - 0.5 z and 1 - 0.25 z^2") {
    auto r1 = polynomial_roots({1.0, -0.5});
    REQUIRE(r1.size() == 1);
    CHECK(std::abs(r1[0] - std::complex<double>(2.0, 0.0)) < 1e-12);
    auto r2 = polynomial_roots({1.0, 0.0, -0.25});
    REQUIRE(r2.size() == 2);
    for (auto z : r2) CHECK(std::abs(z) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("spectral density of white noise") {
    const ModelSpec spec{0, 0};
    // d -> 0 limit, taken at a tiny valid d.
    const double g = spectral_density(spec, {{}, {}, 1e-12, 1.0}, pi / 2);
    CHECK(g == Approx(1.0 / (2.0 * pi)).epsilon(1e-10));
}

TEST_CASE("spectral density of ARFIMA(0,0.3,0) at pi") {
    const ModelSpec spec{0, 0};
    const double g = spectral_density(spec, {{}, {}, 0.3, 1.0}, pi);
    const double ref = oracle::fractional_spectrum_by_autocovariance(0.3, 1.0, pi, 200000);
    CHECK(std::abs(g - ref) < 1e-8);
    CHECK(std::abs(g - 0.105005) < 5e-6);
    // 2^{-0.6} / (2 pi) exactly at omega = pi.
    CHECK(g == Approx(std::pow(2.0, -0.6) / (2.0 * pi)).epsilon(1e-14));
}

TEST_CASE("spectral density of ARFIMA(1,0.3,0) at pi") {
    const ModelSpec spec{1, 0};
    const double g = spectral_density(spec, {{0.2}, {}, 0.3, 1.0}, pi);
    const double ref = oracle::fractional_spectrum_by_autocovariance(0.3, 1.0, pi, 200000) / 1.44;
    CHECK(std::abs(g - ref) < 1e-8);
    CHECK(std::abs(g - 0.072920) < 5e-6);
}

TEST_CASE("spectral density rejects omega at the pole") {
    const ModelSpec spec{0, 0};
    CHECK_THROWS_AS(spectral_density(spec, {{}, {}, 0.3, 1.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(log_spectral_gradient(spec, {{}, {}, 0.3, 1.0}, 0.0), std::domain_error);
}

TEST_CASE("log gradient examples for ARFIMA(0,d,0)") {
    const ModelSpec spec{0, 0};
    auto g = log_spectral_gradient(spec, {{}, {}, 0.3, 1.0}, pi);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == Approx(-2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(g[1] == Approx(1.0).epsilon(1e-14));
    // 2 sin(pi/6) = 1, so the d component vanishes at pi/3.
    auto g3 = log_spectral_gradient(spec, {{}, {}, 0.3, 1.0}, pi / 3);
    CHECK(std::abs(g3[0]) < 1e-14);
}

TEST_CASE("log gradient matches central differences on random draws") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> order(0, 2);
    std::uniform_real_distribution<double> om(0.05, 2.0 * pi - 0.05);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const ModelSpec spec{static_cast<std::size_t>(order(rng)), static_cast<std::size_t>(order(rng))};
        const auto beta = testing_support::random_valid_beta(spec, rng);
        const double omega = om(rng);
        const Eigen::VectorXd an = log_spectral_gradient(spec, beta, omega);
        const Eigen::VectorXd base = beta.packed();
        for (Eigen::Index i = 0; i < base.size(); ++i) {
            Eigen::VectorXd up = base, dn = base;
            up[i] += h;
            dn[i] -= h;
            const double fd = (std::log(spectral_density(spec, ParamVector::unpack(spec, up), omega)) -
                               std::log(spectral_density(spec, ParamVector::unpack(spec, dn), omega))) /
                              (2.0 * h);
            CHECK(std::abs(fd - an[i]) <= 1e-5 * std::max(1.0, std::abs(an[i])));
        }
    }
}

TEST_CASE("spectral density is positive and symmetric about pi") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> om(1e-3, pi);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelSpec spec{static_cast<std::size_t>(trial % 3), static_cast<std::size_t>((trial / 3) % 3)};
        const auto beta = testing_support::random_valid_beta(spec, rng);
        const double w = om(rng);
        const double a = spectral_density(spec, beta, w);
        const double b = spectral_density(spec, beta, 2.0 * pi - w);
        CHECK(a > 0.0);
        CHECK(std::isfinite(a));
        CHECK(a == Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("density is continuous as d approaches 0") {
    const ModelSpec spec{1, 1};
    const ParamVector b{{0.4}, {0.2}, 1e-10, 2.0};
    for (double w : {0.1, 1.0, 2.5}) {
        const std::complex<double> z = std::polar(1.0, -w);
        const double arma = 2.0 / (2.0 * pi) * std::norm(1.0 + 0.2 * z) / std::norm(1.0 - 0.4 * z);
        CHECK(spectral_density(spec, b, w) == Approx(arma).epsilon(1e-8));
    }
}

TEST_CASE("pack/unpack round-trip keeps the fixed order") {
    const ModelSpec spec{2, 1};
    const ParamVector b{{0.1, -0.2}, {0.3}, 0.25, 1.5};
    const auto v = b.packed();
    REQUIRE(v.size() == 5);
    CHECK(v[0] == 0.1);
    CHECK(v[2] == 0.3);
    CHECK(v[spec.d_index()] == 0.25);
    CHECK(v[spec.sigma2_index()] == 1.5);
    CHECK(ParamVector::unpack(spec, v) == b);
}
