#include "ael/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ael::io {
namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void write_series_csv(std::ostream& os, const TimeSeries& series) {
    os << "t,value\n";
    for (std::size_t t = 0; t < series.values.size(); ++t)
        os << (t + 1) << ',' << fmt(series.values[t]) << '\n';
}

std::vector<double> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            std::size_t used = 0;
            const double v = std::stod(field, &used);
            values.push_back(v);
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw std::runtime_error("bad value on line " + std::to_string(lineno) + " of " +
                                     path.string());
        }
    }
    return values;
}

void write_periodogram_csv(std::ostream& os, const Periodogram& pgram) {
    os << "omega,I\n";
    for (std::size_t j = 0; j < pgram.n(); ++j)
        os << fmt(pgram.freqs[j]) << ',' << fmt(pgram.ords[j]) << '\n';
}

void write_region_csv(std::ostream& os, const RegionGrid& grid, const RegionSummary& summary) {
    os << "axis1,axis2,stat,member\n";
    for (Eigen::Index i = 0; i < grid.stats.rows(); ++i)
        for (Eigen::Index j = 0; j < grid.stats.cols(); ++j)
            os << fmt(grid.axis1.node(static_cast<std::size_t>(i))) << ','
               << fmt(grid.axis2.node(static_cast<std::size_t>(j))) << ',' << fmt(grid.stats(i, j))
               << ',' << (summary.mask(i, j) ? 1 : 0) << '\n';
}

void write_boundary_csv(std::ostream& os, const RegionSummary& summary) {
    os << "loop_id,axis1,axis2\n";
    for (std::size_t l = 0; l < summary.boundaries.size(); ++l)
        for (const auto& p : summary.boundaries[l]) os << l << ',' << fmt(p.x) << ',' << fmt(p.y) << '\n';
}

nlohmann::json to_json(const ModelSpec& spec, const ParamVector& beta) {
    return {{"p", spec.p}, {"q", spec.q}, {"phi", beta.phi}, {"theta", beta.theta},
            {"d", beta.d}, {"sigma2", beta.sigma2}};
}

nlohmann::json to_json(const SeriesMeta& meta, std::uint64_t seed, std::size_t length) {
    return {{"model", to_json(meta.spec, meta.beta)},
            {"family", std::string(to_string(meta.family))},
            {"seed", seed},
            {"T", length},
            {"requested_T", meta.requested_length},
            {"method", std::string(to_string(meta.method))},
            {"fallback", meta.fell_back},
            {"burn_in", meta.burn_in},
            {"notices", meta.notices}};
}

nlohmann::json to_json(const ModelSpec& spec, const WhittleFit& fit) {
    nlohmann::json cov = nullptr;
    if (fit.cov_hat) {
        cov = nlohmann::json::array();
        for (Eigen::Index i = 0; i < fit.cov_hat->rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(fit.cov_hat->cols()));
            for (Eigen::Index j = 0; j < fit.cov_hat->cols(); ++j) row[static_cast<std::size_t>(j)] = (*fit.cov_hat)(i, j);
            cov.push_back(row);
        }
    }
    return {{"beta_hat", to_json(spec, fit.beta_hat)},
            {"loglik", finite_or_null(fit.loglik)},
            {"converged", fit.converged},
            {"iterations", fit.iterations},
            {"cov_hat", cov},
            {"score_norm", finite_or_null(fit.score_norm)},
            {"tolerance", fit.tolerance},
            {"message", fit.message}};
}

nlohmann::json to_json(const ModelSpec& spec, const ParamVector& beta, const ELSolution& sol,
                       std::size_t n, std::string_view method) {
    std::vector<double> xi(sol.xi.data(), sol.xi.data() + sol.xi.size());
    return {{"beta", to_json(spec, beta)},
            {"stat", finite_or_null(sol.stat)},
            {"status", std::string(to_string(sol.status))},
            {"xi", xi},
            {"n", n},
            {"a_n", sol.a_n},
            {"method", std::string(method)}};
}

namespace {
void flatten(std::ostream& os, const nlohmann::json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(os, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
        return;
    }
    os << prefix << ',';
    if (j.is_array()) {
        bool first = true;
        for (const auto& e : j) {
            if (!first) os << ';';
            first = false;
            os << (e.is_number_float() ? fmt(e.get<double>()) : e.dump());
        }
    } else if (j.is_number_float()) {
        os << fmt(j.get<double>());
    } else if (j.is_string()) {
        os << j.get<std::string>();
    } else {
        os << j.dump();
    }
    os << '\n';
}
}  // namespace

void write_flat_csv(std::ostream& os, const nlohmann::json& obj) {
    os << "key,value\n";
    flatten(os, obj, "");
}

}  // namespace ael::io
