#include "ael/regions.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

using namespace ael;
using doctest::Approx;

namespace {

// Grid whose statistic is an analytic function of the node coordinates.
template <class F>
RegionGrid synthetic_grid(std::size_t steps, F f) {
    RegionGrid g;
    g.axis1 = {"d", 0.0, 1.0, steps};
    g.axis2 = {"sigma2", 0.0, 1.0, steps};
    g.threshold = 1.0;
    g.stats.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(steps));
    g.valid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
        static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(steps), true);
    for (std::size_t i = 0; i < steps; ++i)
        for (std::size_t j = 0; j < steps; ++j)
            g.stats(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                f(g.axis1.node(i), g.axis2.node(j));
    return g;
}

TimeSeries arfima1(std::size_t T, std::uint64_t seed) {
    return simulate_arfima({1, 0}, {{0.2}, {}, 0.3, 1.0}, InnovationFamily::gaussian, T, seed);
}

}  // namespace

TEST_CASE("coordinate names resolve to packed indices") {
    const ModelSpec spec{2, 1};
    CHECK(coordinate_index(spec, "phi") == 0);
    CHECK(coordinate_index(spec, "phi2") == 1);
    CHECK(coordinate_index(spec, "theta1") == 2);
    CHECK(coordinate_index(spec, "d") == 3);
    CHECK(coordinate_index(spec, "sigma2") == 4);
    CHECK_THROWS_AS(coordinate_index(spec, "phi3"), std::invalid_argument);
    CHECK_THROWS_AS(coordinate_index(spec, "mu"), std::invalid_argument);
}

TEST_CASE("all cells below threshold give the full box") {
    const auto g = synthetic_grid(20, [](double, double) { return 0.5; });
    const auto r = extract_region(g);
    CHECK(r.area_fraction == 1.0);
    CHECK_FALSE(r.empty);
    CHECK(r.boundaries.empty());
}

TEST_CASE("all cells above threshold give an empty region") {
    const auto g = synthetic_grid(20, [](double, double) { return 5.0; });
    const auto r = extract_region(g);
    CHECK(r.empty);
    CHECK(r.area == 0.0);
    CHECK(r.boundaries.empty());
}

TEST_CASE("infeasible cells are never members") {
    const auto g = synthetic_grid(20, [](double x, double) {
        return x < 0.5 ? std::numeric_limits<double>::infinity() : 0.0;
    });
    const auto r = extract_region(g);
    CHECK(r.area_fraction == Approx(0.5));
    REQUIRE(r.boundaries.size() == 1);
    for (const auto& p : r.boundaries[0]) CHECK(p.x == Approx(0.5).epsilon(0.05));
}

TEST_CASE("ellipse boundary is recovered within a grid spacing") {
    const double cx = 0.5, cy = 0.45, a = 0.3, b = 0.2;
    const std::size_t steps = 80;
    auto f = [&](double x, double y) {
        const double u = (x - cx) / a, v = (y - cy) / b;
        return u * u + v * v;
    };
    const auto g = synthetic_grid(steps, f);
    const auto r = extract_region(g);
    REQUIRE(r.boundaries.size() == 1);
    const auto& loop = r.boundaries[0];
    CHECK(loop.front().x == loop.back().x);
    CHECK(loop.front().y == loop.back().y);
    const double h = 1.0 / steps;

    // Hausdorff distance between the traced loop and a dense ellipse sample.
    auto dist_to_loop = [&](double x, double y) {
        double best = 1e300;
        for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
            const double ax = loop[i].x, ay = loop[i].y, bx = loop[i + 1].x, by = loop[i + 1].y;
            const double dx = bx - ax, dy = by - ay;
            const double len2 = dx * dx + dy * dy;
            double t = len2 > 0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, std::hypot(ax + t * dx - x, ay + t * dy - y));
        }
        return best;
    };
    double haus = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double th = 2.0 * std::numbers::pi * i / 2000.0;
        haus = std::max(haus, dist_to_loop(cx + a * std::cos(th), cy + b * std::sin(th)));
    }
    for (const auto& p : loop) {
        // Radial distance to the ellipse, scaled back to coordinates.
        const double r2 = std::sqrt(f(p.x, p.y));
        haus = std::max(haus, std::abs(r2 - 1.0) * std::max(a, b));
    }
    CHECK(haus < h);

    const double expected = std::numbers::pi * a * b;
    CHECK(std::abs(r.area - expected) / expected < 0.03);
}

TEST_CASE("two separate blobs give two closed loops") {
    auto f = [](double x, double y) {
        const double d1 = std::hypot(x - 0.25, y - 0.5) / 0.1;
        const double d2 = std::hypot(x - 0.75, y - 0.5) / 0.1;
        return std::min(d1 * d1, d2 * d2);
    };
    const auto r = extract_region(synthetic_grid(60, f));
    CHECK(r.boundaries.size() == 2);
}

TEST_CASE("grid arguments are validated") {
    const auto ts = arfima1(201, 1);
    const ModelSpec spec{1, 0};
    CHECK_THROWS_AS(evaluate_grid(ts, spec, {"d", 0.0, 0.5, 20}, {"d", 0.0, 0.5, 20}, RegionMethod::ael),
                    std::invalid_argument);
    CHECK_THROWS_AS(evaluate_grid(ts, spec, {"phi", 0.0, 1.0, 9}, {"d", 0.0, 0.5, 20}, RegionMethod::ael),
                    std::invalid_argument);
    CHECK_THROWS_AS(evaluate_grid(ts, spec, {"theta", 0.0, 1.0, 20}, {"d", 0.0, 0.5, 20}, RegionMethod::ael),
                    std::invalid_argument);
}

TEST_CASE("invalid grid cells are marked and never members") {
    const ModelSpec spec{1, 0};
    const auto grid = evaluate_grid(arfima1(301, 2), spec, {"phi", 0.0, 1.2, 24}, {"d", 0.0, 0.5, 10},
                                    RegionMethod::ael);
    for (Eigen::Index i = 0; i < grid.stats.rows(); ++i) {
        const bool stationary = grid.axis1.node(static_cast<std::size_t>(i)) < 1.0 - 1e-6;
        for (Eigen::Index j = 0; j < grid.stats.cols(); ++j) {
            CHECK(grid.valid(i, j) == stationary);
            if (!stationary) CHECK(std::isnan(grid.stats(i, j)));
        }
    }
    const auto r = extract_region(grid);
    for (Eigen::Index i = 0; i < r.mask.rows(); ++i)
        for (Eigen::Index j = 0; j < r.mask.cols(); ++j)
            if (!grid.valid(i, j)) CHECK_FALSE(r.mask(i, j));
}

TEST_CASE("AEL region contains the EL region at T = 100") {
    const ModelSpec spec{1, 0};
    const auto ts = arfima1(101, 3);
    const GridAxis a1{"phi", 0.0, 1.0, 30}, a2{"d", 0.0, 0.5, 30};
    const auto el = evaluate_grid(ts, spec, a1, a2, RegionMethod::el);
    const auto ael = evaluate_grid(ts, spec, a1, a2, RegionMethod::ael);
    const auto rel = extract_region(el), rael = extract_region(ael);
    for (Eigen::Index i = 0; i < rel.mask.rows(); ++i)
        for (Eigen::Index j = 0; j < rel.mask.cols(); ++j)
            if (rel.mask(i, j)) CHECK(rael.mask(i, j));
    CHECK(rael.area >= rel.area);
}

TEST_CASE("grid centred on the estimate has its minimum at the centre") {
    const ModelSpec spec{1, 0};
    const auto ts = arfima1(1001, 4);
    const auto pg = periodogram(ts);
    const auto fit = whittle_fit(spec, pg);
    REQUIRE(fit.converged);
    const double p = fit.beta_hat.phi[0], d = fit.beta_hat.d;
    const GridAxis a1{"phi", p - 0.11, p + 0.11, 11}, a2{"d", d - 0.055, d + 0.055, 11};
    const auto grid = evaluate_grid(spec, pg, fit, a1, a2, RegionMethod::ael);
    Eigen::Index bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 11; ++i)
        for (Eigen::Index j = 0; j < 11; ++j)
            if (std::isfinite(grid.stats(i, j)) && grid.stats(i, j) < best) {
                best = grid.stats(i, j);
                bi = i;
                bj = j;
            }
    CHECK(bi == 5);
    CHECK(bj == 5);
    CHECK(best < 1e-8);
}

TEST_CASE("truth and estimate fall inside the AEL region at T = 1500") {
    const ModelSpec spec{1, 0};
    const double thr = chisq_quantile(2, 0.95);
    int truth_in = 0, est_in = 0;
    const int reps = 50;
    for (int r = 0; r < reps; ++r) {
        const auto pg = periodogram(arfima1(1501, 100 + r));
        const auto fit = whittle_fit(spec, pg);
        const std::size_t i1 = coordinate_index(spec, "phi"), i2 = coordinate_index(spec, "d");
        if (region_statistic(spec, pg, fit.beta_hat, i1, 0.2, i2, 0.3, RegionMethod::ael, {}) <= thr) ++truth_in;
        if (region_statistic(spec, pg, fit.beta_hat, i1, fit.beta_hat.phi[0], i2, fit.beta_hat.d,
                             RegionMethod::ael, {}) <= thr)
            ++est_in;
    }
    CHECK(est_in == reps);
    CHECK(truth_in >= 0.9 * reps);
}

TEST_CASE("region area is stable under grid refinement") {
    const ModelSpec spec{1, 0};
    const auto ts = arfima1(1501, 5);
    const auto pg = periodogram(ts);
    const auto fit = whittle_fit(spec, pg);
    REQUIRE(fit.converged);
    const double p = fit.beta_hat.phi[0], d = fit.beta_hat.d;
    auto area = [&](std::size_t steps) {
        const GridAxis a1{"phi", p - 0.3, p + 0.3, steps}, a2{"d", std::max(0.0, d - 0.2), std::min(0.5, d + 0.2), steps};
        return extract_region(evaluate_grid(spec, pg, fit, a1, a2, RegionMethod::ael)).area;
    };
    const double coarse = area(30), fine = area(60);
    REQUIRE(fine > 0.0);
    CHECK(std::abs(coarse - fine) / fine < 0.05);
}

TEST_CASE("grid evaluation does not depend on the number of jobs") {
    const ModelSpec spec{1, 0};
    const auto ts = arfima1(201, 6);
    RegionOptions one, three;
    three.jobs = 3;
    const GridAxis a1{"phi", 0.0, 1.0, 12}, a2{"d", 0.0, 0.5, 12};
    const auto g1 = evaluate_grid(ts, spec, a1, a2, RegionMethod::el, one);
    const auto g3 = evaluate_grid(ts, spec, a1, a2, RegionMethod::el, three);
    for (Eigen::Index i = 0; i < 12; ++i)
        for (Eigen::Index j = 0; j < 12; ++j) {
            const double x = g1.stats(i, j), y = g3.stats(i, j);
            CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
        }
}
