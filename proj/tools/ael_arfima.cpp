// ael-arfima: simulate, estimate, stat, region and coverage pipelines.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence
// (diagnostics are still written).
#include "ael/coverage.hpp"
#include "ael/elratio.hpp"
#include "ael/io.hpp"
#include "ael/parallel.hpp"
#include "ael/regions.hpp"
#include "ael/simulate.hpp"
#include "ael/spectral.hpp"
#include "ael/whittle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kNoConvergence = 3;

// Raised for user-facing validation failures; mapped to exit code 2.
struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* kFormats = R"(File formats:
  series.csv           t,value            one row per observation, t = 1..T
  periodogram.csv      omega,I            Fourier frequency and ordinate
  region_<M>.csv       axis1,axis2,stat,member
                       grid cell centres; stat empty = invalid parameters,
                       inf = EL convex-hull failure; member is 0/1
  boundary_<M>.csv     loop_id,axis1,axis2
                       region boundary polylines; closed loops repeat their
                       first point
  coverage_table.csv   family,T,method,d=<d1>,d=<d2>,...
  coverage_long.csv    method,T,T_used,d,family,level,replicates,hits,coverage,
                       mc_se,infeasible_count,bartlett_factor,bartlett_reliable
  *.csv from estimate/stat (--format csv): key,value
Config files (--config) hold flat key=value lines using the long option
names; command-line flags take precedence. Every run writes the effective
configuration to <out>/config.ini.
Exit codes: 0 success, 2 invalid input, 3 non-convergence.)";

struct Common {
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string format = "csv";
    unsigned jobs = 0;
};

void add_common(CLI::App& app, Common& c) {
    app.set_config("--config", "", "Read flat key=value options from this file");
    app.add_option("--seed", c.seed, "Root random seed")->capture_default_str();
    app.add_option("--out", c.out, "Output directory")->capture_default_str();
    app.add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--jobs", c.jobs, "Worker threads (0 = all cores)")->capture_default_str();
    app.footer(kFormats);
}

struct ModelArgs {
    std::size_t p = 0, q = 0;
    std::string phi, theta;  // comma-separated; empty means no coefficients
    double d = 0.3;
    double sigma2 = 1.0;
};

void add_model(CLI::App& app, ModelArgs& m, bool with_beta) {
    app.add_option("--p", m.p, "AR order")->capture_default_str();
    app.add_option("--q", m.q, "MA order")->capture_default_str();
    if (!with_beta) return;
    app.add_option("--phi", m.phi, "AR coefficients, comma separated")->capture_default_str();
    app.add_option("--theta", m.theta, "MA coefficients, comma separated")->capture_default_str();
    app.add_option("--d", m.d, "Fractional differencing parameter")->capture_default_str();
    app.add_option("--sigma2", m.sigma2, "Innovation variance")->capture_default_str();
}

ael::ModelSpec spec_of(const ModelArgs& m) { return {m.p, m.q}; }

std::vector<double> parse_list(const std::string& text, const char* name) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput(std::string("--") + name + ": cannot parse '" + item + "'");
        }
    }
    return out;
}

ael::ParamVector beta_of(const ModelArgs& m) {
    ael::ParamVector b{parse_list(m.phi, "phi"), parse_list(m.theta, "theta"), m.d, m.sigma2};
    const auto spec = spec_of(m);
    if (b.phi.size() != spec.p || b.theta.size() != spec.q)
        throw InvalidInput("--phi/--theta must list exactly p and q coefficients");
    const auto report = ael::validate(spec, b);
    if (!report.ok()) throw InvalidInput(report.describe());
    return b;
}

fs::path prepare_out(const Common& c) {
    const fs::path dir(c.out);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

template <class Writer>
void write_with(const fs::path& path, Writer&& w) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    w(f);
}

void echo_config(const CLI::App& app, const fs::path& dir) {
    write_text(dir / "config.ini", app.config_to_str(true, false));
}

ael::TimeSeries load_series(const std::string& input) {
    ael::TimeSeries ts;
    try {
        ts.values = ael::io::read_series_csv(input);
    } catch (const std::exception& e) {
        throw InvalidInput(e.what());
    }
    if (ts.values.size() < 5) throw InvalidInput("series must have at least 5 observations");
    return ts;
}

// ---------------------------------------------------------------------------

int cmd_simulate(int argc, char** argv) {
    CLI::App app{"Simulate an ARFIMA(p,d,q) series", "ael-arfima simulate"};
    Common c;
    ModelArgs m;
    std::string family = "gaussian";
    std::size_t T = 1001;
    add_common(app, c);
    add_model(app, m, true);
    app.add_option("--family", family, "Innovation law: gaussian, student5, student10, exponential, chisq5")
        ->capture_default_str();
    app.add_option("--T", T, "Series length (even values are reduced by one)")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const auto spec = spec_of(m);
    const auto beta = beta_of(m);
    ael::InnovationFamily fam;
    try {
        fam = ael::parse_family(family);
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }
    if (T < 5) throw InvalidInput("series length must be at least 5");

    const auto ts = ael::simulate_arfima(spec, beta, fam, T, c.seed);
    const auto dir = prepare_out(c);
    echo_config(app, dir);
    json meta = ael::io::to_json(*ts.meta, ts.seed, ts.size());
    if (c.format == "json") {
        meta["values"] = ts.values;
    } else {
        write_with(dir / "series.csv", [&](std::ostream& os) { ael::io::write_series_csv(os, ts); });
    }
    write_json(dir / "series.json", meta);
    for (const auto& n : ts.meta->notices) std::cerr << "note: " << n << '\n';
    return kOk;
}

int cmd_estimate(int argc, char** argv) {
    CLI::App app{"Whittle estimate with sandwich covariance", "ael-arfima estimate"};
    Common c;
    ModelArgs m;
    std::string input;
    int starts = 5, max_iter = 200;
    bool write_pgram = false;
    add_common(app, c);
    add_model(app, m, false);
    app.add_option("--input", input, "Series CSV (t,value)")->required();
    app.add_option("--starts", starts, "Quasi-random starting points")->capture_default_str();
    app.add_option("--max-iter", max_iter, "Newton iterations per start")->capture_default_str();
    app.add_flag("--periodogram", write_pgram, "Also write periodogram.csv");
    CLI11_PARSE(app, argc, argv);

    const auto spec = spec_of(m);
    const auto ts = load_series(input);
    const auto pg = ael::periodogram(ts.values);
    if (pg.n() < spec.dof()) throw InvalidInput("too few Fourier frequencies for the model");
    if (starts < 1) throw InvalidInput("--starts must be at least 1");
    if (max_iter < 0) throw InvalidInput("--max-iter must be non-negative");
    ael::WhittleOptions opt;
    opt.starts = starts;
    opt.max_iter = max_iter;
    const auto fit = ael::whittle_fit(spec, pg, opt);

    const auto dir = prepare_out(c);
    echo_config(app, dir);
    json j = ael::io::to_json(spec, fit);
    j["T"] = ts.size();
    j["n"] = pg.n();
    write_json(dir / "fit.json", j);
    if (c.format == "csv") write_with(dir / "fit.csv", [&](std::ostream& os) { ael::io::write_flat_csv(os, j); });
    if (write_pgram)
        write_with(dir / "periodogram.csv", [&](std::ostream& os) { ael::io::write_periodogram_csv(os, pg); });
    if (!fit.converged) {
        std::cerr << "error: Whittle fit did not converge: " << fit.message << '\n';
        return kNoConvergence;
    }
    return kOk;
}

ael::AELConfig ael_config(const std::string& rule, double fixed) {
    try {
        return {ael::parse_an_rule(rule), fixed};
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }
}

int cmd_stat(int argc, char** argv) {
    CLI::App app{"EL / AEL ratio statistic at given parameters", "ael-arfima stat"};
    Common c;
    ModelArgs m;
    std::string input, method = "both", rule = "max1-halflog";
    double fixed = 1.0;
    add_common(app, c);
    add_model(app, m, true);
    app.add_option("--input", input, "Series CSV (t,value)")->required();
    app.add_option("--method", method, "el, ael or both")
        ->check(CLI::IsMember({"el", "ael", "both"}))
        ->capture_default_str();
    app.add_option("--an-rule", rule, "AEL constant: max1-halflog, halflog or fixed")->capture_default_str();
    app.add_option("--an-fixed", fixed, "a_n value for --an-rule fixed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const auto spec = spec_of(m);
    const auto beta = beta_of(m);
    const auto cfg = ael_config(rule, fixed);
    const auto ts = load_series(input);
    const auto pg = ael::periodogram(ts.values);
    if (pg.n() <= spec.dof()) throw InvalidInput("too few Fourier frequencies for the model");

    json j = json::object();
    bool stalled = false;
    if (method != "ael") {
        const auto sol = ael::el_stat(spec, beta, pg);
        stalled |= sol.status == ael::ELStatus::max_iter;
        j["EL"] = ael::io::to_json(spec, beta, sol, pg.n(), "EL");
    }
    if (method != "el") {
        const auto sol = ael::ael_stat(spec, beta, pg, cfg);
        stalled |= sol.status == ael::ELStatus::max_iter;
        j["AEL"] = ael::io::to_json(spec, beta, sol, pg.n(), "AEL");
        j["AEL"]["a_n_rule"] = std::string(ael::to_string(cfg.rule));
    }
    j["threshold_95"] = ael::chisq_quantile(static_cast<int>(spec.dof()), 0.95);
    j["df"] = spec.dof();

    const auto dir = prepare_out(c);
    echo_config(app, dir);
    write_json(dir / "stat.json", j);
    if (c.format == "csv") write_with(dir / "stat.csv", [&](std::ostream& os) { ael::io::write_flat_csv(os, j); });
    if (stalled) {
        std::cerr << "error: Lagrange multiplier iteration did not converge\n";
        return kNoConvergence;
    }
    return kOk;
}

int cmd_region(int argc, char** argv) {
    CLI::App app{"Two-dimensional EL / AEL confidence regions on a grid", "ael-arfima region"};
    Common c;
    ModelArgs m;
    m.p = 1;
    m.phi = "0.2";
    std::string input, family = "gaussian", method = "both", rule = "max1-halflog";
    std::size_t T = 100;
    double fixed = 1.0, level = 0.95;
    ael::GridAxis a1{"phi", 0.0, 1.0, 60}, a2{"d", 0.0, 0.5, 60};
    add_common(app, c);
    add_model(app, m, true);
    app.add_option("--input", input, "Series CSV (t,value); if absent a series is simulated from the model options");
    app.add_option("--family", family, "Innovation law when simulating")->capture_default_str();
    app.add_option("--T", T, "Length when simulating")->capture_default_str();
    app.add_option("--axis1", a1.name, "First grid coordinate (phiN, thetaN, d, sigma2)")->capture_default_str();
    app.add_option("--lo1", a1.lo, "")->capture_default_str();
    app.add_option("--hi1", a1.hi, "")->capture_default_str();
    app.add_option("--steps1", a1.steps, "")->capture_default_str();
    app.add_option("--axis2", a2.name, "Second grid coordinate")->capture_default_str();
    app.add_option("--lo2", a2.lo, "")->capture_default_str();
    app.add_option("--hi2", a2.hi, "")->capture_default_str();
    app.add_option("--steps2", a2.steps, "")->capture_default_str();
    app.add_option("--method", method, "el, ael or both")
        ->check(CLI::IsMember({"el", "ael", "both"}))
        ->capture_default_str();
    app.add_option("--level", level, "Confidence level")->capture_default_str();
    app.add_option("--an-rule", rule, "AEL constant: max1-halflog, halflog or fixed")->capture_default_str();
    app.add_option("--an-fixed", fixed, "a_n value for --an-rule fixed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const auto spec = spec_of(m);
    ael::RegionOptions opt;
    opt.level = level;
    opt.ael = ael_config(rule, fixed);
    opt.jobs = c.jobs;
    if (!(level > 0.0 && level < 1.0)) throw InvalidInput("level must lie in (0, 1)");
    try {
        (void)ael::coordinate_index(spec, a1.name);
        (void)ael::coordinate_index(spec, a2.name);
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }

    ael::TimeSeries ts;
    json source;
    if (!input.empty()) {
        ts = load_series(input);
        source = {{"input", input}};
    } else {
        const auto beta = beta_of(m);
        ael::InnovationFamily fam;
        try {
            fam = ael::parse_family(family);
        } catch (const std::invalid_argument& e) {
            throw InvalidInput(e.what());
        }
        if (T < 5) throw InvalidInput("series length must be at least 5");
        ts = ael::simulate_arfima(spec, beta, fam, T, c.seed);
        source = ael::io::to_json(*ts.meta, ts.seed, ts.size());
    }

    const auto dir = prepare_out(c);
    echo_config(app, dir);
    const auto pg = ael::periodogram(ts.values);
    if (pg.n() <= spec.dof()) throw InvalidInput("too few Fourier frequencies for the model");
    const auto fit = ael::whittle_fit(spec, pg, opt.whittle);
    json summary = {{"source", source}, {"fit", ael::io::to_json(spec, fit)}, {"level", level}};
    if (!fit.converged) {
        write_json(dir / "region_summary.json", summary);
        std::cerr << "error: Whittle fit did not converge: " << fit.message << '\n';
        return kNoConvergence;
    }

    std::vector<ael::RegionMethod> methods;
    if (method != "ael") methods.push_back(ael::RegionMethod::el);
    if (method != "el") methods.push_back(ael::RegionMethod::ael);
    try {
        for (auto rm : methods) {
            const auto grid = ael::evaluate_grid(spec, pg, fit, a1, a2, rm, opt);
            const auto reg = ael::extract_region(grid);
            const std::string tag(ael::to_string(rm));
            if (c.format == "csv") {
                write_with(dir / ("region_" + tag + ".csv"),
                           [&](std::ostream& os) { ael::io::write_region_csv(os, grid, reg); });
                write_with(dir / ("boundary_" + tag + ".csv"),
                           [&](std::ostream& os) { ael::io::write_boundary_csv(os, reg); });
            }
            json r = {{"axis1", {{"name", a1.name}, {"lo", a1.lo}, {"hi", a1.hi}, {"steps", a1.steps}}},
                      {"axis2", {{"name", a2.name}, {"lo", a2.lo}, {"hi", a2.hi}, {"steps", a2.steps}}},
                      {"threshold", grid.threshold},
                      {"member_cells", reg.member_cells},
                      {"area_fraction", reg.area_fraction},
                      {"area", reg.area},
                      {"empty", reg.empty},
                      {"infeasible_cells", grid.infeasible_cells},
                      {"boundary_loops", reg.boundaries.size()}};
            if (rm == ael::RegionMethod::ael) r["a_n"] = opt.ael.a_n(pg.n());
            if (c.format == "json") {
                std::vector<std::vector<json>> stats(static_cast<std::size_t>(grid.stats.rows()));
                for (Eigen::Index i = 0; i < grid.stats.rows(); ++i)
                    for (Eigen::Index jj = 0; jj < grid.stats.cols(); ++jj) {
                        const double v = grid.stats(i, jj);
                        stats[static_cast<std::size_t>(i)].push_back(std::isnan(v) ? json(nullptr)
                                                                     : std::isinf(v) ? json("inf")
                                                                                     : json(v));
                    }
                r["stats"] = stats;
                json loops = json::array();
                for (const auto& loop : reg.boundaries) {
                    json pts = json::array();
                    for (const auto& p : loop) pts.push_back({p.x, p.y});
                    loops.push_back(pts);
                }
                r["boundaries"] = loops;
            }
            summary[tag] = r;
        }
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }
    summary["notes"] = {"grid statistics use the Whittle estimate for off-axis coordinates",
                        "threshold is the chi-square(2) quantile at the requested level"};
    write_json(dir / "region_summary.json", summary);
    return kOk;
}

int cmd_coverage(int argc, char** argv) {
    CLI::App app{"Monte Carlo coverage of EL, Bartlett-corrected EL and AEL for ARFIMA(0,d,0)",
                 "ael-arfima coverage"};
    Common c;
    std::vector<std::size_t> Ts{50, 70, 100, 200};
    std::vector<double> ds{0.1, 0.2, 0.3, 0.4};
    std::vector<std::string> families{"gaussian"};
    ael::CoverageOptions opt;
    std::string rule = "halflog";
    double fixed = 1.0;
    add_common(app, c);
    app.add_option("--T", Ts, "Series lengths, comma separated")->delimiter(',')->capture_default_str();
    app.add_option("--d", ds, "Values of d, comma separated")->delimiter(',')->capture_default_str();
    app.add_option("--family", families, "Innovation laws, comma separated")->delimiter(',')->capture_default_str();
    app.add_option("--replicates", opt.replicates, "Monte Carlo replicates per cell")->capture_default_str();
    app.add_option("--level", opt.level, "Confidence level")->capture_default_str();
    app.add_option("--tb-reps", opt.tb_reps, "Bootstrap size for the theoretical Bartlett factor")->capture_default_str();
    app.add_option("--eb-reps", opt.eb_reps, "Bootstrap size for the estimated Bartlett factor")->capture_default_str();
    app.add_option("--an-rule", rule, "AEL constant: max1-halflog, halflog or fixed")->capture_default_str();
    app.add_option("--an-fixed", fixed, "a_n value for --an-rule fixed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    opt.seed = c.seed;
    opt.jobs = c.jobs;
    opt.ael = ael_config(rule, fixed);
    if (!(opt.level > 0.0 && opt.level < 1.0)) throw InvalidInput("level must lie in (0, 1)");
    if (opt.tb_reps < 200 || opt.eb_reps < 200) throw InvalidInput("Bartlett bootstraps need at least 200 replicates");
    std::vector<ael::CoverageCell> plan;
    try {
        for (const auto& f : families)
            for (auto T : Ts)
                for (double d : ds) plan.push_back({T, d, ael::parse_family(f)});
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }

    ael::CoverageReport rep;
    try {
        rep = ael::run_coverage(plan, opt);
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }
    const auto dir = prepare_out(c);
    echo_config(app, dir);
    write_with(dir / "coverage_table.csv", [&](std::ostream& os) { ael::write_coverage_table(os, rep); });
    write_with(dir / "coverage_long.csv", [&](std::ostream& os) { ael::write_coverage_long(os, rep); });
    json meta = {{"seed", c.seed},
                 {"replicates", opt.replicates},
                 {"level", opt.level},
                 {"a_n_rule", std::string(ael::to_string(opt.ael.rule))},
                 {"tb_reps", opt.tb_reps},
                 {"eb_reps", opt.eb_reps},
                 {"notes", rep.notes}};
    json unreliable = json::array();
    for (const auto& cell : rep.cells)
        if (!cell.bartlett_reliable)
            unreliable.push_back({{"method", cell.method}, {"T", cell.T}, {"d", cell.d},
                                  {"family", std::string(ael::to_string(cell.family))}});
    meta["unreliable_bartlett_factors"] = unreliable;
    write_json(dir / "coverage_meta.json", meta);
    return kOk;
}

void usage(std::ostream& os) {
    os << "usage: ael-arfima <command> [options]\n\n"
          "commands:\n"
          "  simulate   simulate an ARFIMA(p,d,q) series\n"
          "  estimate   Whittle estimate and sandwich covariance from a series\n"
          "  stat       EL / AEL statistic at given parameters\n"
          "  region     confidence regions on a 2-D parameter grid\n"
          "  coverage   Monte Carlo coverage table for ARFIMA(0,d,0)\n\n"
          "Run 'ael-arfima <command> --help' for options.\n\n"
       << kFormats << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage(std::cerr);
        return kInvalid;
    }
    const std::string cmd = argv[1];
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        usage(std::cout);
        return kOk;
    }
    // Hand the subcommand its own argv with the command name as program name.
    int sub_argc = argc - 1;
    char** sub_argv = argv + 1;
    try {
        int rc;
        if (cmd == "simulate") rc = cmd_simulate(sub_argc, sub_argv);
        else if (cmd == "estimate") rc = cmd_estimate(sub_argc, sub_argv);
        else if (cmd == "stat") rc = cmd_stat(sub_argc, sub_argv);
        else if (cmd == "region") rc = cmd_region(sub_argc, sub_argv);
        else if (cmd == "coverage") rc = cmd_coverage(sub_argc, sub_argv);
        else {
            std::cerr << "error: unknown command '" << cmd << "'\n";
            usage(std::cerr);
            return kInvalid;
        }
        // CLI11 parse failures return its own non-zero codes; fold them into 2.
        return rc == kOk || rc == kNoConvergence ? rc : kInvalid;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
