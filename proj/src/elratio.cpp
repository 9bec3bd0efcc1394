#include "ael/elratio.hpp"

#include "ael/whittle.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ael {

std::string_view to_string(ELStatus status) {
    switch (status) {
        case ELStatus::converged: return "converged";
        case ELStatus::infeasible: return "infeasible";
        case ELStatus::max_iter: return "max-iter";
    }
    return "unknown";
}

namespace {

// Owen's pseudo-logarithm: ln(x) for x >= eps, its second-order Taylor
// expansion about eps below that. Concave and C2 on the whole line.
struct PseudoLog {
    double eps;
    double value(double x) const {
        if (x >= eps) return std::log(x);
        const double r = x / eps;
        return std::log(eps) - 1.5 + 2.0 * r - 0.5 * r * r;
    }
    double d1(double x) const { return x >= eps ? 1.0 / x : (2.0 - x / eps) / eps; }
    // Negated second derivative (positive).
    double neg_d2(double x) const { return x >= eps ? 1.0 / (x * x) : 1.0 / (eps * eps); }
};

// Newton direction solving H delta = g with a pseudo-inverse, so directions
// along which every row is flat are left alone.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = 1e-13 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd proj = es.eigenvectors().transpose() * g;
    for (Eigen::Index i = 0; i < proj.size(); ++i) proj[i] = ev[i] > cut ? proj[i] / ev[i] : 0.0;
    return es.eigenvectors() * proj;
}

}  // namespace

ELSolution solve_lagrange(const Eigen::MatrixXd& rows, int max_iter) {
    const Eigen::Index m = rows.rows();
    const Eigen::Index k = rows.cols();
    if (m <= k) throw std::invalid_argument("empirical likelihood needs more rows than columns");
    if (!rows.allFinite()) throw std::invalid_argument("estimating-function rows must be finite");

    const double md = static_cast<double>(m);
    const PseudoLog plog{1.0 / md};
    const double scale = std::max(rows.rowwise().norm().maxCoeff(), 1e-300);

    ELSolution sol;
    sol.m = static_cast<std::size_t>(m);
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(k);

    auto objective = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd args = (rows * x).array() + 1.0;
        double f = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) f += plog.value(args[j]);
        return f;
    };

    bool converged = false;
    bool diverged = false;
    Eigen::VectorXd grad(k);
    int it = 0;
    for (; it < max_iter; ++it) {
        const Eigen::VectorXd args = (rows * xi).array() + 1.0;
        Eigen::VectorXd w1(m), w2(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            w1[j] = plog.d1(args[j]);
            w2[j] = plog.neg_d2(args[j]);
        }
        grad = rows.transpose() * w1;
        if (grad.norm() <= 1e-13 * md * scale) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd hess = rows.transpose() * w2.asDiagonal() * rows;
        Eigen::VectorXd step = newton_direction(hess, grad);
        if (step.squaredNorm() == 0.0) {
            converged = true;  // gradient lies in the flat subspace
            break;
        }

        const double f0 = objective(xi);
        const double slope = grad.dot(step);
        double t = 1.0;
        bool moved = false;
        if (slope <= 1e-10 * (1.0 + std::abs(f0))) {
            // The predicted increase is at the rounding level of the objective,
            // so Armijo cannot discriminate; take the full Newton step if it
            // reduces the gradient.
            const Eigen::VectorXd trial = xi + step;
            const Eigen::VectorXd ta = (rows * trial).array() + 1.0;
            Eigen::VectorXd tw(m);
            for (Eigen::Index j = 0; j < m; ++j) tw[j] = plog.d1(ta[j]);
            if ((rows.transpose() * tw).norm() < grad.norm()) {
                xi = trial;
                moved = true;
            }
        } else {
            for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
                const Eigen::VectorXd trial = xi + t * step;
                if (objective(trial) >= f0 + 1e-4 * t * slope) {
                    xi = trial;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved || (t * step).norm() <= 1e-15 * (1.0 + xi.norm())) {
            // Stalled at rounding level: accept if stationary enough.
            converged = true;
            ++it;
            break;
        }
        if (xi.norm() * scale > 1e12) {
            diverged = true;
            ++it;
            break;
        }
    }
    sol.iterations = it;
    sol.xi = xi;

    const Eigen::VectorXd args = (rows * xi).array() + 1.0;
    const bool inside = (args.array() >= 1.0 / md).all();
    const Eigen::VectorXd residual =
        rows.transpose() * args.cwiseInverse() / md;  // sum_j p_j psi_j

    if (converged && inside && residual.norm() <= 1e-8 * std::max(1.0, scale)) {
        sol.status = ELStatus::converged;
        sol.weights.resize(static_cast<std::size_t>(m));
        double stat = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            sol.weights[static_cast<std::size_t>(j)] = 1.0 / (md * args[j]);
            stat += std::log(args[j]);
        }
        sol.stat = std::max(0.0, 2.0 * stat);
        return sol;
    }

    // Unbounded dual: a direction u with u' psi_j >= 0 for all rows certifies
    // that 0 is outside the interior of the hull.
    if (diverged || !converged || !inside) {
        const double nrm = xi.norm();
        if (nrm > 0.0) {
            const Eigen::VectorXd u = xi / nrm;
            const Eigen::VectorXd proj = rows * u;
            if (proj.minCoeff() >= -1e-7 * scale) {
                sol.status = ELStatus::infeasible;
                sol.stat = std::numeric_limits<double>::infinity();
                return sol;
            }
        }
    }
    sol.status = ELStatus::max_iter;
    sol.stat = std::numeric_limits<double>::quiet_NaN();
    return sol;
}

double AELConfig::a_n(std::size_t n) const {
    const double half_log = 0.5 * std::log(static_cast<double>(n));
    switch (rule) {
        case AnRule::max1_halflog: return std::max(1.0, half_log);
        case AnRule::halflog: return half_log;
        case AnRule::fixed: return fixed_value;
    }
    return 1.0;
}

std::string_view to_string(AnRule rule) {
    switch (rule) {
        case AnRule::max1_halflog: return "max1-halflog";
        case AnRule::halflog: return "halflog";
        case AnRule::fixed: return "fixed";
    }
    return "unknown";
}

AnRule parse_an_rule(std::string_view tag) {
    if (tag == "max1-halflog") return AnRule::max1_halflog;
    if (tag == "halflog") return AnRule::halflog;
    if (tag == "fixed") return AnRule::fixed;
    throw std::invalid_argument("unknown a_n rule '" + std::string(tag) + "'");
}

Eigen::MatrixXd ael_augment(const Eigen::MatrixXd& psi, const AELConfig& cfg) {
    const Eigen::Index n = psi.rows();
    if (n < 1) throw std::invalid_argument("cannot augment an empty estimating-function matrix");
    Eigen::MatrixXd out(n + 1, psi.cols());
    out.topRows(n) = psi;
    out.row(n) = -cfg.a_n(static_cast<std::size_t>(n)) * psi.colwise().mean();
    return out;
}

ELSolution el_stat(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram) {
    const auto psi = psi_matrix(spec, beta, pgram);
    return solve_lagrange(psi.rows);
}

ELSolution ael_stat(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram,
                    const AELConfig& cfg) {
    const auto psi = psi_matrix(spec, beta, pgram);
    auto sol = solve_lagrange(ael_augment(psi.rows, cfg));
    sol.a_n = cfg.a_n(pgram.n());
    return sol;
}

double chisq_quantile(int k, double level) {
    if (k < 1) throw std::invalid_argument("chi-square degrees of freedom must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(k), level);
}

}  // namespace ael
