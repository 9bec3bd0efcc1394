#include "ael/elratio.hpp"

#include "ael/parallel.hpp"
#include "ael/rng.hpp"
#include "ael/whittle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ael {

std::string_view to_string(BartlettMode mode) {
    return mode == BartlettMode::estimated ? "estimated" : "theoretical";
}

double mean_matching_factor(std::span<const double> stats, std::size_t k) {
    if (stats.empty()) throw std::invalid_argument("no statistics to average");
    const double mean = std::accumulate(stats.begin(), stats.end(), 0.0) /
                        static_cast<double>(stats.size());
    if (!(mean > 0.0)) throw std::invalid_argument("mean statistic must be positive");
    return static_cast<double>(k) / mean;
}

BartlettFactor bartlett_factors(const BartlettRequest& req) {
    if (req.reps < 200) throw std::invalid_argument("Bartlett factor needs at least 200 replicates");
    if (req.length < 5) throw std::invalid_argument("bootstrap series length must be at least 5");

    BartlettFactor out;
    out.mode = req.mode;
    out.beta_gen = req.beta_ref;
    if (req.mode == BartlettMode::estimated) {
        if (req.data == nullptr)
            throw std::invalid_argument("estimated Bartlett factor needs the observed periodogram");
        WhittleOptions opts;
        opts.start = req.beta_ref;
        const auto fit = whittle_fit(req.spec, *req.data, opts);
        if (!fit.converged)
            throw std::runtime_error("Whittle fit for the estimated Bartlett factor did not converge");
        out.beta_gen = fit.beta_hat;
    }
    const auto report = validate(req.spec, out.beta_gen);
    if (!report.ok()) throw std::invalid_argument(report.describe());

    std::vector<double> stats(req.reps, 0.0);
    parallel_for(req.reps, req.jobs, [&](std::size_t r) {
        const auto series =
            simulate_arfima(req.spec, out.beta_gen, req.family, req.length, derive_seed(req.seed, r));
        const auto sol = el_stat(req.spec, out.beta_gen, periodogram(series));
        stats[r] = sol.status == ELStatus::converged ? sol.stat
                                                     : std::numeric_limits<double>::quiet_NaN();
    });

    std::vector<double> kept;
    kept.reserve(stats.size());
    for (double s : stats)
        if (std::isfinite(s)) kept.push_back(s);
    out.used = kept.size();
    out.dropped = stats.size() - kept.size();
    out.reliable = static_cast<double>(out.dropped) <= 0.2 * static_cast<double>(stats.size());
    if (kept.empty()) {
        out.reliable = false;
        out.b = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.b = mean_matching_factor(kept, req.spec.dof());
    return out;
}

}  // namespace ael
