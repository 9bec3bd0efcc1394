// Monte Carlo coverage of EL, Bartlett-corrected EL and AEL regions for
// ARFIMA(0,d,0) at the true parameter (d, sigma2).
#pragma once

#include "ael/elratio.hpp"
#include "ael/simulate.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ael {

struct CoverageCell {
    std::size_t T = 50;  // requested length; even values run with T - 1
    double d = 0.3;
    InnovationFamily family = InnovationFamily::gaussian;
};

struct CoverageOptions {
    std::size_t replicates = 1000;
    double level = 0.95;
    std::uint64_t seed = 1;
    AELConfig ael{AnRule::halflog, 1.0};
    std::size_t tb_reps = 2000;  // theoretical Bartlett bootstrap size per cell
    std::size_t eb_reps = 500;   // estimated Bartlett bootstrap size per cell
    unsigned jobs = 1;
};

struct CoverageRecord {
    std::string method;  // EL, EB, TB, AEL
    std::size_t T = 0;   // requested length
    std::size_t T_used = 0;
    double d = 0.0;
    InnovationFamily family = InnovationFamily::gaussian;
    double level = 0.95;
    std::size_t replicates = 0;
    std::size_t hits = 0;
    double coverage = 0.0;
    double mc_se = 0.0;  // sqrt(c (1 - c) / R)
    std::size_t infeasible_count = 0;
    double bartlett_factor = 1.0;  // b for EB/TB, 1 otherwise
    bool bartlett_reliable = true;
};

struct CoverageReport {
    std::vector<CoverageRecord> cells;
    std::vector<std::string> notes;  // run metadata: reading of the statistic, EB scheme, T mapping

    const CoverageRecord* find(std::string_view method, std::size_t T, double d,
                               InnovationFamily family) const;
};

/// sqrt(c (1 - c) / R).
double coverage_standard_error(double coverage, std::size_t replicates);

/// For each plan cell and replicate: simulate ARFIMA(0,d,0) with the cell's
/// innovation law, evaluate W and W* at beta_true = (d, family variance) and
/// count hits against chisq_quantile(2, level). TB scales W by a theoretical
/// Bartlett factor from a bootstrap at beta_true; EB scales W by one shared
/// Bartlett factor from a bootstrap at the median per-replicate Whittle fit.
/// An infeasible EL replicate never covers. Deterministic given the seed and
/// independent of `jobs`.
///
/// Throws std::invalid_argument for replicates < 100 or a cell with d outside (0, 0.5).
CoverageReport run_coverage(std::span<const CoverageCell> plan, const CoverageOptions& options);

/// Table layout: one row per (family, T, method), one column per d.
void write_coverage_table(std::ostream& os, const CoverageReport& report);
/// Long layout with mc_se, infeasible counts and Bartlett factors.
void write_coverage_long(std::ostream& os, const CoverageReport& report);

}  // namespace ael
