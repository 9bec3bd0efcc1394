// Two-dimensional confidence regions from EL / AEL statistics on a grid.
#pragma once

#include "ael/elratio.hpp"
#include "ael/whittle.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ael {

enum class RegionMethod { el, ael };
std::string_view to_string(RegionMethod method);

/// One grid axis over a named coordinate ("phi1".."phip", "theta1".."thetaq",
/// "d", "sigma2"; "phi"/"theta" mean the first coefficient). The grid nodes
/// are cell centers lo + (i + 1/2)(hi - lo)/steps, i = 0..steps-1.
struct GridAxis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t steps = 60;

    double node(std::size_t i) const {
        return lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(steps);
    }
    double spacing() const { return (hi - lo) / static_cast<double>(steps); }
};

/// Index of a named coordinate in the packed parameter vector.
/// Throws std::invalid_argument for unknown names.
std::size_t coordinate_index(const ModelSpec& spec, std::string_view name);

struct RegionGrid {
    GridAxis axis1, axis2;
    ModelSpec spec;
    ParamVector fixed;      // plug-in values (Whittle estimate) for the other coordinates
    Eigen::MatrixXd stats;  // axis1.steps x axis2.steps; NaN for invalid cells, +inf for infeasible EL
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> valid;
    double level = 0.95;
    double threshold = 0.0;  // chisq_quantile(2, level)
    RegionMethod method = RegionMethod::ael;
    std::size_t infeasible_cells = 0;
};

struct RegionOptions {
    double level = 0.95;
    AELConfig ael;
    WhittleOptions whittle;
    unsigned jobs = 1;
};

/// Raised by evaluate_grid when the Whittle fit it depends on fails.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, WhittleFit fit)
        : std::runtime_error(what), fit_(std::move(fit)) {}
    const WhittleFit& fit() const noexcept { return fit_; }

private:
    WhittleFit fit_;
};

/// Statistic at `base` with the two axis coordinates overridden. Returns NaN
/// when the resulting parameters are invalid.
double region_statistic(const ModelSpec& spec, const Periodogram& pgram, const ParamVector& base,
                        std::size_t index1, double value1, std::size_t index2, double value2,
                        RegionMethod method, const AELConfig& cfg);

/// Fills the grid using the given fit as plug-in for off-axis coordinates.
RegionGrid evaluate_grid(const ModelSpec& spec, const Periodogram& pgram, const WhittleFit& fit,
                         const GridAxis& axis1, const GridAxis& axis2, RegionMethod method,
                         const RegionOptions& options = {});

/// Fits the Whittle estimate once (throws FitError if it does not converge)
/// and fills the grid.
RegionGrid evaluate_grid(const TimeSeries& series, const ModelSpec& spec, const GridAxis& axis1,
                         const GridAxis& axis2, RegionMethod method,
                         const RegionOptions& options = {});

struct RegionPoint {
    double x = 0.0;  // axis1 coordinate
    double y = 0.0;  // axis2 coordinate
};

struct RegionSummary {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // stat <= threshold
    std::size_t member_cells = 0;
    double area_fraction = 0.0;
    double area = 0.0;  // area_fraction times the box area
    bool empty = true;
    /// Boundary polylines by marching squares over the cell-center lattice.
    /// A closed loop repeats its first point at the end.
    std::vector<std::vector<RegionPoint>> boundaries;
};

RegionSummary extract_region(const RegionGrid& grid);

}  // namespace ael
