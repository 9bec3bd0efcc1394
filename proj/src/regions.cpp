#include "ael/regions.hpp"

#include "ael/parallel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace ael {

std::string_view to_string(RegionMethod method) { return method == RegionMethod::el ? "EL" : "AEL"; }

std::size_t coordinate_index(const ModelSpec& spec, std::string_view name) {
    auto numbered = [&](std::string_view prefix, std::size_t order, std::size_t offset) -> long {
        if (name.substr(0, prefix.size()) != prefix) return -1;
        const auto rest = name.substr(prefix.size());
        std::size_t idx = 1;
        if (!rest.empty()) {
            idx = 0;
            for (char c : rest) {
                if (c < '0' || c > '9') return -1;
                idx = idx * 10 + static_cast<std::size_t>(c - '0');
            }
        }
        if (idx < 1 || idx > order) return -2;
        return static_cast<long>(offset + idx - 1);
    };
    if (name == "d") return spec.d_index();
    if (name == "sigma2") return spec.sigma2_index();
    for (auto [prefix, order, offset] :
         {std::tuple{std::string_view("phi"), spec.p, std::size_t{0}},
          std::tuple{std::string_view("theta"), spec.q, spec.p}}) {
        const long r = numbered(prefix, order, offset);
        if (r >= 0) return static_cast<std::size_t>(r);
        if (r == -2)
            throw std::invalid_argument("coordinate '" + std::string(name) +
                                        "' exceeds the model order");
    }
    throw std::invalid_argument("unknown coordinate '" + std::string(name) + "'");
}

double region_statistic(const ModelSpec& spec, const Periodogram& pgram, const ParamVector& base,
                        std::size_t index1, double value1, std::size_t index2, double value2,
                        RegionMethod method, const AELConfig& cfg) {
    Eigen::VectorXd v = base.packed();
    v[static_cast<Eigen::Index>(index1)] = value1;
    v[static_cast<Eigen::Index>(index2)] = value2;
    const auto beta = ParamVector::unpack(spec, v);
    if (!validate(spec, beta).ok()) return std::numeric_limits<double>::quiet_NaN();
    const auto sol = method == RegionMethod::el ? el_stat(spec, beta, pgram)
                                                : ael_stat(spec, beta, pgram, cfg);
    if (sol.status == ELStatus::infeasible) return std::numeric_limits<double>::infinity();
    if (sol.status != ELStatus::converged) return std::numeric_limits<double>::quiet_NaN();
    return sol.stat;
}

RegionGrid evaluate_grid(const ModelSpec& spec, const Periodogram& pgram, const WhittleFit& fit,
                         const GridAxis& axis1, const GridAxis& axis2, RegionMethod method,
                         const RegionOptions& options) {
    const std::size_t i1 = coordinate_index(spec, axis1.name);
    const std::size_t i2 = coordinate_index(spec, axis2.name);
    if (i1 == i2) throw std::invalid_argument("grid axes must name two distinct coordinates");
    if (axis1.steps < 10 || axis2.steps < 10)
        throw std::invalid_argument("grid axes need at least 10 steps");
    if (!(axis1.lo < axis1.hi) || !(axis2.lo < axis2.hi))
        throw std::invalid_argument("grid axis bounds must satisfy lo < hi");

    RegionGrid grid;
    grid.axis1 = axis1;
    grid.axis2 = axis2;
    grid.spec = spec;
    grid.fixed = fit.beta_hat;
    grid.level = options.level;
    grid.threshold = chisq_quantile(2, options.level);
    grid.method = method;
    const auto s1 = static_cast<Eigen::Index>(axis1.steps);
    const auto s2 = static_cast<Eigen::Index>(axis2.steps);
    grid.stats = Eigen::MatrixXd::Constant(s1, s2, std::numeric_limits<double>::quiet_NaN());
    grid.valid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(s1, s2, false);

    parallel_for(axis1.steps * axis2.steps, options.jobs, [&](std::size_t cell) {
        const std::size_t a = cell / axis2.steps;
        const std::size_t b = cell % axis2.steps;
        Eigen::VectorXd v = grid.fixed.packed();
        v[static_cast<Eigen::Index>(i1)] = axis1.node(a);
        v[static_cast<Eigen::Index>(i2)] = axis2.node(b);
        if (!validate(spec, ParamVector::unpack(spec, v)).ok()) return;
        grid.valid(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = true;
        grid.stats(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            region_statistic(spec, pgram, grid.fixed, i1, axis1.node(a), i2, axis2.node(b), method,
                             options.ael);
    });
    grid.infeasible_cells = static_cast<std::size_t>((grid.stats.array() == std::numeric_limits<double>::infinity()).count());
    return grid;
}

RegionGrid evaluate_grid(const TimeSeries& series, const ModelSpec& spec, const GridAxis& axis1,
                         const GridAxis& axis2, RegionMethod method, const RegionOptions& options) {
    const auto pgram = periodogram(series);
    auto fit = whittle_fit(spec, pgram, options.whittle);
    if (!fit.converged) throw FitError("Whittle fit did not converge: " + fit.message, fit);
    return evaluate_grid(spec, pgram, fit, axis1, axis2, method, options);
}

namespace {

// Edge of the cell-center lattice: (i, j, 0) joins node (i,j) to (i+1,j);
// (i, j, 1) joins node (i,j) to (i,j+1).
using EdgeKey = std::tuple<Eigen::Index, Eigen::Index, int>;

struct Tracer {
    const RegionGrid& grid;
    const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& inside;

    RegionPoint node_point(Eigen::Index i, Eigen::Index j) const {
        return {grid.axis1.node(static_cast<std::size_t>(i)), grid.axis2.node(static_cast<std::size_t>(j))};
    }

    RegionPoint crossing(const EdgeKey& e) const {
        const auto [i, j, dir] = e;
        const Eigen::Index i2 = dir == 0 ? i + 1 : i;
        const Eigen::Index j2 = dir == 0 ? j : j + 1;
        const double a = grid.stats(i, j);
        const double b = grid.stats(i2, j2);
        double t = 0.5;
        if (std::isfinite(a) && std::isfinite(b) && a != b) t = (grid.threshold - a) / (b - a);
        t = std::clamp(t, 0.0, 1.0);
        const auto p = node_point(i, j);
        const auto q = node_point(i2, j2);
        return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
    }
};

}  // namespace

RegionSummary extract_region(const RegionGrid& grid) {
    RegionSummary out;
    const Eigen::Index s1 = grid.stats.rows();
    const Eigen::Index s2 = grid.stats.cols();
    out.mask.resize(s1, s2);
    for (Eigen::Index i = 0; i < s1; ++i)
        for (Eigen::Index j = 0; j < s2; ++j) {
            const double v = grid.stats(i, j);
            out.mask(i, j) = std::isfinite(v) && v <= grid.threshold;
        }
    out.member_cells = static_cast<std::size_t>(out.mask.count());
    out.area_fraction = static_cast<double>(out.member_cells) / static_cast<double>(s1 * s2);
    out.area = out.area_fraction * (grid.axis1.hi - grid.axis1.lo) * (grid.axis2.hi - grid.axis2.lo);
    out.empty = out.member_cells == 0;
    if (out.empty || s1 < 2 || s2 < 2) return out;

    const Tracer tracer{grid, out.mask};

    // Segments per lattice square, stored as pairs of edge keys.
    std::vector<std::array<EdgeKey, 2>> segments;
    for (Eigen::Index i = 0; i + 1 < s1; ++i) {
        for (Eigen::Index j = 0; j + 1 < s2; ++j) {
            const bool c0 = out.mask(i, j), c1 = out.mask(i + 1, j);
            const bool c2 = out.mask(i + 1, j + 1), c3 = out.mask(i, j + 1);
            const int code = c0 | (c1 << 1) | (c2 << 2) | (c3 << 3);
            if (code == 0 || code == 15) continue;
            const EdgeKey e0{i, j, 0}, e1{i + 1, j, 1}, e2{i, j + 1, 0}, e3{i, j, 1};
            if (code == 5 || code == 10) {
                const double avg = 0.25 * (grid.stats(i, j) + grid.stats(i + 1, j) +
                                           grid.stats(i + 1, j + 1) + grid.stats(i, j + 1));
                const bool centre_in = std::isfinite(avg) && avg <= grid.threshold;
                const bool cut_c1_c3 = (code == 5) == centre_in;
                if (cut_c1_c3) {
                    segments.push_back({e0, e1});
                    segments.push_back({e2, e3});
                } else {
                    segments.push_back({e3, e0});
                    segments.push_back({e1, e2});
                }
                continue;
            }
            std::vector<EdgeKey> crossed;
            if (c0 != c1) crossed.push_back(e0);
            if (c1 != c2) crossed.push_back(e1);
            if (c2 != c3) crossed.push_back(e2);
            if (c3 != c0) crossed.push_back(e3);
            segments.push_back({crossed[0], crossed[1]});
        }
    }

    std::map<EdgeKey, std::vector<std::size_t>> at_edge;
    for (std::size_t s = 0; s < segments.size(); ++s)
        for (const auto& e : segments[s]) at_edge[e].push_back(s);

    std::vector<bool> used(segments.size(), false);
    auto trace = [&](std::size_t first, const EdgeKey& start) {
        std::vector<RegionPoint> line{tracer.crossing(start)};
        EdgeKey cur = start;
        std::size_t seg = first;
        while (true) {
            used[seg] = true;
            const EdgeKey next = segments[seg][0] == cur ? segments[seg][1] : segments[seg][0];
            line.push_back(tracer.crossing(next));
            cur = next;
            std::size_t follow = segments.size();
            for (std::size_t cand : at_edge[cur])
                if (!used[cand]) follow = cand;
            if (follow == segments.size()) break;
            seg = follow;
        }
        out.boundaries.push_back(std::move(line));
    };

    // Open polylines start at edges touched by a single segment (grid border).
    for (const auto& [edge, segs] : at_edge)
        if (segs.size() == 1 && !used[segs[0]]) trace(segs[0], edge);
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s]) trace(s, segments[s][0]);
    return out;
}

}  // namespace ael
