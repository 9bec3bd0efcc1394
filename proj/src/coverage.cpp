#include "ael/coverage.hpp"

#include "ael/parallel.hpp"
#include "ael/rng.hpp"
#include "ael/spectral.hpp"
#include "ael/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace ael {

double coverage_standard_error(double coverage, std::size_t replicates) {
    if (replicates == 0) return 0.0;
    return std::sqrt(coverage * (1.0 - coverage) / static_cast<double>(replicates));
}

const CoverageRecord* CoverageReport::find(std::string_view method, std::size_t T, double d,
                                           InnovationFamily family) const {
    for (const auto& c : cells)
        if (c.method == method && c.T == T && std::abs(c.d - d) < 1e-12 && c.family == family)
            return &c;
    return nullptr;
}

namespace {

constexpr const char* kMethods[] = {"EL", "EB", "TB", "AEL"};

// Seed of a plan cell depends on its content, not its position in the plan.
std::uint64_t cell_seed(std::uint64_t root, const CoverageCell& cell) {
    const auto d_key = static_cast<std::uint64_t>(std::llround(cell.d * 1e9));
    return derive_seed(root, {static_cast<std::uint64_t>(cell.T), d_key,
                              static_cast<std::uint64_t>(cell.family)});
}

struct ReplicateOutcome {
    double el = 0.0;
    ELStatus el_status = ELStatus::max_iter;
    double ael = 0.0;
    ELStatus ael_status = ELStatus::max_iter;
    bool fit_ok = false;
    double d_hat = 0.0;
    double sigma2_hat = 0.0;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

CoverageRecord make_record(const char* method, const CoverageCell& cell, std::size_t T_used,
                           const CoverageOptions& opt) {
    CoverageRecord r;
    r.method = method;
    r.T = cell.T;
    r.T_used = T_used;
    r.d = cell.d;
    r.family = cell.family;
    r.level = opt.level;
    r.replicates = opt.replicates;
    return r;
}

}  // namespace

CoverageReport run_coverage(std::span<const CoverageCell> plan, const CoverageOptions& opt) {
    if (opt.replicates < 100) throw std::invalid_argument("coverage needs at least 100 replicates");
    for (const auto& cell : plan) {
        if (!(cell.d > 0.0 && cell.d < 0.5)) throw std::invalid_argument("d must lie in (0, 0.5)");
        if (cell.T < 5) throw std::invalid_argument("series length must be at least 5");
    }

    const ModelSpec spec{0, 0};
    const std::size_t k = spec.dof();
    const double threshold = chisq_quantile(static_cast<int>(k), opt.level);

    CoverageReport report;
    report.notes.push_back("statistic evaluated at the joint vector (d, sigma2), k = 2, sigma2 = innovation variance");
    report.notes.push_back("a_n rule: " + std::string(to_string(opt.ael.rule)));
    report.notes.push_back("TB: mean-matching factor k/mean(W) from " + std::to_string(opt.tb_reps) +
                           " bootstrap series at the true parameters");
    report.notes.push_back("EB: one shared mean-matching factor per cell from " +
                           std::to_string(opt.eb_reps) +
                           " bootstrap series at the median per-replicate Whittle estimate");
    report.notes.push_back("even T is simulated with T-1 observations (same n = floor((T-1)/2))");

    for (const auto& cell : plan) {
        const std::uint64_t seed = cell_seed(opt.seed, cell);
        const ParamVector truth{{}, {}, cell.d, family_variance(cell.family)};
        const std::size_t T_used = cell.T % 2 == 0 ? cell.T - 1 : cell.T;

        std::vector<ReplicateOutcome> outcomes(opt.replicates);
        parallel_for(opt.replicates, opt.jobs, [&](std::size_t r) {
            const auto series =
                simulate_arfima(spec, truth, cell.family, cell.T, derive_seed(seed, {0, r}));
            const auto pgram = periodogram(series);
            auto& o = outcomes[r];
            const auto el = el_stat(spec, truth, pgram);
            o.el = el.stat;
            o.el_status = el.status;
            const auto ael = ael_stat(spec, truth, pgram, opt.ael);
            o.ael = ael.stat;
            o.ael_status = ael.status;
            WhittleOptions wopt;
            wopt.start = truth;
            const auto fit = whittle_fit(spec, pgram, wopt);
            o.fit_ok = fit.converged;
            o.d_hat = fit.beta_hat.d;
            o.sigma2_hat = fit.beta_hat.sigma2;
        });

        BartlettRequest tb_req;
        tb_req.spec = spec;
        tb_req.beta_ref = truth;
        tb_req.family = cell.family;
        tb_req.length = cell.T;
        tb_req.mode = BartlettMode::theoretical;
        tb_req.reps = opt.tb_reps;
        tb_req.seed = derive_seed(seed, 1);
        tb_req.jobs = opt.jobs;
        const auto tb = bartlett_factors(tb_req);

        std::vector<double> d_hats, s_hats;
        for (const auto& o : outcomes)
            if (o.fit_ok) {
                d_hats.push_back(o.d_hat);
                s_hats.push_back(o.sigma2_hat);
            }
        ParamVector eb_beta = truth;
        if (!d_hats.empty()) {
            eb_beta.d = median(d_hats);
            eb_beta.sigma2 = median(s_hats);
        }
        BartlettRequest eb_req = tb_req;
        eb_req.beta_ref = eb_beta;
        eb_req.reps = opt.eb_reps;
        eb_req.seed = derive_seed(seed, 2);
        auto eb = bartlett_factors(eb_req);
        eb.mode = BartlettMode::estimated;

        auto el_rec = make_record("EL", cell, T_used, opt);
        auto eb_rec = make_record("EB", cell, T_used, opt);
        auto tb_rec = make_record("TB", cell, T_used, opt);
        auto ael_rec = make_record("AEL", cell, T_used, opt);
        eb_rec.bartlett_factor = eb.b;
        eb_rec.bartlett_reliable = eb.reliable;
        tb_rec.bartlett_factor = tb.b;
        tb_rec.bartlett_reliable = tb.reliable;

        for (const auto& o : outcomes) {
            if (o.el_status == ELStatus::converged) {
                if (o.el <= threshold) ++el_rec.hits;
                if (eb.b * o.el <= threshold) ++eb_rec.hits;
                if (tb.b * o.el <= threshold) ++tb_rec.hits;
            } else {
                ++el_rec.infeasible_count;
                ++eb_rec.infeasible_count;
                ++tb_rec.infeasible_count;
            }
            if (o.ael_status == ELStatus::converged) {
                if (o.ael <= threshold) ++ael_rec.hits;
            } else {
                ++ael_rec.infeasible_count;
            }
        }
        for (auto* rec : {&el_rec, &eb_rec, &tb_rec, &ael_rec}) {
            rec->coverage = static_cast<double>(rec->hits) / static_cast<double>(rec->replicates);
            rec->mc_se = coverage_standard_error(rec->coverage, rec->replicates);
            report.cells.push_back(*rec);
        }
    }
    return report;
}

void write_coverage_table(std::ostream& os, const CoverageReport& report) {
    std::vector<double> ds;
    std::vector<std::pair<InnovationFamily, std::size_t>> rows;
    for (const auto& c : report.cells) {
        if (std::none_of(ds.begin(), ds.end(), [&](double d) { return std::abs(d - c.d) < 1e-12; }))
            ds.push_back(c.d);
        const std::pair key{c.family, c.T};
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
    }
    std::sort(ds.begin(), ds.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second < b.second;
    });

    char buf[64];
    os << "family,T,method";
    for (double d : ds) {
        std::snprintf(buf, sizeof buf, ",d=%g", d);
        os << buf;
    }
    os << '\n';
    for (const auto& [family, T] : rows) {
        for (const char* method : kMethods) {
            os << to_string(family) << ',' << T << ',' << method;
            for (double d : ds) {
                const auto* rec = report.find(method, T, d, family);
                if (rec) {
                    std::snprintf(buf, sizeof buf, ",%.3f", rec->coverage);
                    os << buf;
                } else {
                    os << ',';
                }
            }
            os << '\n';
        }
    }
}

void write_coverage_long(std::ostream& os, const CoverageReport& report) {
    os << "method,T,T_used,d,family,level,replicates,hits,coverage,mc_se,infeasible_count,"
          "bartlett_factor,bartlett_reliable\n";
    char buf[512];
    for (const auto& c : report.cells) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.17g,%s,%.17g,%zu,%zu,%.17g,%.17g,%zu,%.17g,%d\n",
                      c.method.c_str(), c.T, c.T_used, c.d, std::string(to_string(c.family)).c_str(),
                      c.level, c.replicates, c.hits, c.coverage, c.mc_se, c.infeasible_count,
                      c.bartlett_factor, c.bartlett_reliable ? 1 : 0);
        os << buf;
    }
}

}  // namespace ael
