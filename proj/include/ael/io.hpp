// File formats: series / periodogram / region CSVs and JSON reports.
#pragma once

#include "ael/elratio.hpp"
#include "ael/regions.hpp"
#include "ael/simulate.hpp"
#include "ael/spectral.hpp"
#include "ael/whittle.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace ael::io {

/// Header `t,value`, t = 1..T, values printed with round-trip precision.
void write_series_csv(std::ostream& os, const TimeSeries& series);

/// Reads the value column of a `t,value` file (a single-column file without
/// header also works). Throws std::runtime_error on unreadable input.
std::vector<double> read_series_csv(const std::filesystem::path& path);

/// Header `omega,I`.
void write_periodogram_csv(std::ostream& os, const Periodogram& pgram);

/// Long format `axis1,axis2,stat,member`; invalid cells have an empty stat,
/// infeasible cells print `inf`.
void write_region_csv(std::ostream& os, const RegionGrid& grid, const RegionSummary& summary);

/// Polylines as `loop_id,axis1,axis2`.
void write_boundary_csv(std::ostream& os, const RegionSummary& summary);

nlohmann::json to_json(const ModelSpec& spec, const ParamVector& beta);
nlohmann::json to_json(const SeriesMeta& meta, std::uint64_t seed, std::size_t length);
/// {beta_hat, loglik, converged, iterations, cov_hat, score_norm, tolerance, message}
nlohmann::json to_json(const ModelSpec& spec, const WhittleFit& fit);
/// {beta, stat, status, xi, n, a_n, method}; an infeasible stat is null.
nlohmann::json to_json(const ModelSpec& spec, const ParamVector& beta, const ELSolution& sol,
                       std::size_t n, std::string_view method);

/// Flattens a JSON object into `key,value` rows (arrays joined with ';').
void write_flat_csv(std::ostream& os, const nlohmann::json& obj);

}  // namespace ael::io
