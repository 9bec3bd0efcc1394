#include "ael/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ael {
namespace {

void require_valid(const ModelSpec& spec, const ParamVector& beta) {
    const auto report = validate(spec, beta);
    if (!report.ok()) throw std::domain_error("invalid parameters: " + report.describe());
}

// Fills psi rows and returns the log-likelihood; no validation.
double evaluate(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram,
                Eigen::MatrixXd* rows) {
    const std::size_t n = pgram.n();
    if (rows) rows->resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.dof()));
    double ll = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto terms = spectral_terms(spec, beta, pgram.freqs[j]);
        const double ratio = pgram.ords[j] / terms.density;
        ll -= std::log(terms.density) + ratio;
        if (rows) rows->row(static_cast<Eigen::Index>(j)) = (ratio - 1.0) * terms.log_gradient.transpose();
    }
    return ll;
}

// The profile likelihood over the shape coordinates (phi, theta, d) with
// sigma2 replaced by its closed-form maximizer, clamped to the box.
class Profile {
public:
    Profile(const ModelSpec& spec, const Periodogram& pgram, const ParameterBox& box)
        : spec_(spec), pgram_(pgram), box_(box) {
        const std::size_t s = spec.p + spec.q + 1;
        lo_.resize(static_cast<Eigen::Index>(s));
        hi_.resize(static_cast<Eigen::Index>(s));
        for (std::size_t i = 0; i < spec.p + spec.q; ++i) {
            lo_[i] = box.arma_lo;
            hi_[i] = box.arma_hi;
        }
        lo_[s - 1] = box.d_lo;
        hi_[s - 1] = box.d_hi;
    }

    struct Eval {
        bool valid = false;
        double value = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd grad;        // shape coordinates
        Eigen::VectorXd full_score;  // all k coordinates
        ParamVector beta;
    };

    const Eigen::VectorXd& lo() const { return lo_; }
    const Eigen::VectorXd& hi() const { return hi_; }
    std::size_t dim() const { return static_cast<std::size_t>(lo_.size()); }

    ParamVector with_shape(const Eigen::VectorXd& x, double sigma2) const {
        Eigen::VectorXd v(x.size() + 1);
        v.head(x.size()) = x;
        v[x.size()] = sigma2;
        return ParamVector::unpack(spec_, v);
    }

    Eval eval(const Eigen::VectorXd& x) const {
        Eval e;
        ParamVector beta = with_shape(x, 1.0);
        if (!validate(spec_, beta).ok()) return e;
        // With sigma2 = 1 the density is h_j / (2 pi); the maximizing sigma2 is
        // (1/n) sum I_j / g_j(sigma2 = 1).
        double acc = 0.0;
        for (std::size_t j = 0; j < pgram_.n(); ++j)
            acc += pgram_.ords[j] / spectral_density(spec_, beta, pgram_.freqs[j]);
        beta.sigma2 = std::clamp(acc / static_cast<double>(pgram_.n()), box_.sigma2_lo,
                                 box_.sigma2_hi);
        Eigen::MatrixXd rows;
        e.value = evaluate(spec_, beta, pgram_, &rows);
        if (!std::isfinite(e.value)) return e;
        e.full_score = rows.colwise().sum().transpose();
        e.grad = e.full_score.head(static_cast<Eigen::Index>(dim()));
        e.beta = beta;
        e.valid = true;
        return e;
    }

private:
    const ModelSpec& spec_;
    const Periodogram& pgram_;
    ParameterBox box_;
    Eigen::VectorXd lo_, hi_;
};

struct RunResult {
    Profile::Eval best;
    bool converged = false;
    int iterations = 0;
    double pg_norm = std::numeric_limits<double>::infinity();
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

// Coordinates pinned at a bound with the score pushing outward.
std::vector<bool> free_mask(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                            const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    std::vector<bool> free(static_cast<std::size_t>(x.size()), true);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double eps = 1e-12 * std::max(1.0, std::abs(x[i]));
        if (x[i] <= lo[i] + eps && g[i] < 0.0) free[i] = false;
        if (x[i] >= hi[i] - eps && g[i] > 0.0) free[i] = false;
    }
    return free;
}

double projected_norm(const Profile::Eval& e, const std::vector<bool>& free) {
    // Shape coordinates that are free plus the sigma2 component.
    double s = 0.0;
    for (std::size_t i = 0; i < free.size(); ++i)
        if (free[i]) s += e.full_score[static_cast<Eigen::Index>(i)] * e.full_score[static_cast<Eigen::Index>(i)];
    const double sig = e.full_score[e.full_score.size() - 1];
    return std::sqrt(s + sig * sig);
}

Eigen::MatrixXd fd_hessian(const Profile& prof, const Eigen::VectorXd& x,
                           const Profile::Eval& at, double step) {
    const Eigen::Index s = x.size();
    Eigen::MatrixXd h(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
        const double hi = step * std::max(1.0, std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += hi;
        xm[i] -= hi;
        const auto ep = prof.eval(xp);
        const auto em = prof.eval(xm);
        if (ep.valid && em.valid)
            h.col(i) = (ep.grad - em.grad) / (2.0 * hi);
        else if (ep.valid)
            h.col(i) = (ep.grad - at.grad) / hi;
        else if (em.valid)
            h.col(i) = (at.grad - em.grad) / hi;
        else
            h.col(i).setZero();
    }
    return 0.5 * (h + h.transpose());
}

RunResult newton_run(const Profile& prof, Eigen::VectorXd x, double tol, int max_iter,
                     double step) {
    RunResult run;
    x = project(x, prof.lo(), prof.hi());
    auto cur = prof.eval(x);
    if (!cur.valid) return run;
    run.best = cur;

    // Once the tolerance is met, a few more Newton steps are taken so that
    // the returned point does not depend on where the search came from.
    int polish = 0;
    for (int it = 0; it < max_iter; ++it) {
        const auto free = free_mask(x, cur.grad, prof.lo(), prof.hi());
        run.pg_norm = projected_norm(cur, free);
        run.iterations = it;
        if (run.pg_norm <= tol) {
            run.converged = true;
            if (run.pg_norm <= 1e-4 * tol || polish++ == 3) break;
        }

        std::vector<Eigen::Index> idx;
        for (std::size_t i = 0; i < free.size(); ++i)
            if (free[i]) idx.push_back(static_cast<Eigen::Index>(i));
        if (idx.empty()) {
            run.converged = true;
            break;
        }

        // Newton direction on the free block with the Hessian of -loglik made
        // positive definite by eigenvalue flooring.
        const Eigen::MatrixXd hess = fd_hessian(prof, x, cur, step);
        const Eigen::Index f = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd neg(f, f);
        Eigen::VectorXd gf(f);
        for (Eigen::Index a = 0; a < f; ++a) {
            gf[a] = cur.grad[idx[a]];
            for (Eigen::Index b = 0; b < f; ++b) neg(a, b) = -hess(idx[a], idx[b]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(neg);
        Eigen::VectorXd ev = es.eigenvalues();
        const double floor = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());
        for (Eigen::Index a = 0; a < f; ++a) ev[a] = std::max(std::abs(ev[a]), floor);
        const Eigen::VectorXd df =
            es.eigenvectors() * (es.eigenvectors().transpose() * gf).cwiseQuotient(ev);

        Eigen::VectorXd dir = Eigen::VectorXd::Zero(x.size());
        for (Eigen::Index a = 0; a < f; ++a) dir[idx[a]] = df[a];

        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1) {
                // Fall back to a scaled steepest-ascent direction.
                dir.setZero();
                for (Eigen::Index a = 0; a < f; ++a) dir[idx[a]] = gf[a];
                dir *= 0.1 / std::max(gf.norm(), 1e-300);
            }
            double t = 1.0;
            for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
                const Eigen::VectorXd xn = project(x + t * dir, prof.lo(), prof.hi());
                if ((xn - x).norm() == 0.0) break;
                const auto en = prof.eval(xn);
                if (!en.valid) continue;
                if (en.value >= cur.value + 1e-4 * cur.grad.dot(xn - x)) {
                    x = xn;
                    cur = en;
                    accepted = true;
                    break;
                }
            }
        }
        run.best = cur;
        if (!accepted) {
            // No ascent possible at machine precision; the point is as good as
            // this search can certify.
            const auto fm = free_mask(x, cur.grad, prof.lo(), prof.hi());
            run.pg_norm = projected_norm(cur, fm);
            run.converged = run.pg_norm <= tol;
            run.iterations = it + 1;
            return run;
        }
        run.iterations = it + 1;
    }
    if (!run.converged) {
        const auto fm = free_mask(x, cur.grad, prof.lo(), prof.hi());
        run.pg_norm = projected_norm(cur, fm);
        run.converged = run.pg_norm <= tol;
    }
    run.best = cur;
    return run;
}

double radical_inverse(std::size_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

}  // namespace

double whittle_loglik(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram) {
    require_valid(spec, beta);
    return evaluate(spec, beta, pgram, nullptr);
}

PsiMatrix psi_matrix(const ModelSpec& spec, const ParamVector& beta, const Periodogram& pgram) {
    require_valid(spec, beta);
    PsiMatrix psi;
    psi.beta_at = beta;
    evaluate(spec, beta, pgram, &psi.rows);
    return psi;
}

Eigen::VectorXd whittle_score(const ModelSpec& spec, const ParamVector& beta,
                              const Periodogram& pgram) {
    return psi_matrix(spec, beta, pgram).rows.colwise().sum().transpose();
}

SandwichParts sandwich_covariance(const ModelSpec& spec, const ParamVector& beta,
                                  const Periodogram& pgram, double fd_step) {
    const auto psi = psi_matrix(spec, beta, pgram);
    const double n = static_cast<double>(pgram.n());
    const Eigen::Index k = static_cast<Eigen::Index>(spec.dof());
    const Eigen::VectorXd x = beta.packed();

    SandwichParts parts;
    parts.sigma_hat = psi.rows.transpose() * psi.rows / n;
    parts.a_hat.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double h = fd_step * std::max(1.0, std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        Eigen::MatrixXd rp, rm;
        evaluate(spec, ParamVector::unpack(spec, xp), pgram, &rp);
        evaluate(spec, ParamVector::unpack(spec, xm), pgram, &rm);
        parts.a_hat.col(i) = (rp.colwise().sum() - rm.colwise().sum()).transpose() / (2.0 * h * n);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(parts.a_hat);
    if (lu.rank() == k && lu.rcond() > 1e-12) {
        const Eigen::MatrixXd a_inv = lu.inverse();
        const Eigen::MatrixXd v = a_inv * parts.sigma_hat * a_inv.transpose();
        parts.v_hat = 0.5 * (v + v.transpose());
    }
    return parts;
}

WhittleFit whittle_fit(const ModelSpec& spec, const Periodogram& pgram,
                       const WhittleOptions& options) {
    const ParameterBox& box = options.box;
    if (!(box.arma_lo < box.arma_hi && box.d_lo < box.d_hi && box.sigma2_lo < box.sigma2_hi) ||
        box.d_lo <= 0.0 || box.d_hi >= 0.5 || box.sigma2_lo <= 0.0)
        throw std::invalid_argument("parameter box must be a non-empty region of the valid set");
    if (pgram.n() < spec.dof()) throw std::invalid_argument("too few Fourier frequencies for the model");
    if (options.starts < 0 || (options.starts == 0 && !options.start))
        throw std::invalid_argument("at least one starting point is required");

    const Profile prof(spec, pgram, box);
    const double tol = 1e-6 * static_cast<double>(pgram.n());

    std::vector<Eigen::VectorXd> starts;
    if (options.start) {
        check_dimensions(spec, *options.start);
        starts.push_back(options.start->packed().head(static_cast<Eigen::Index>(prof.dim())));
    }
    static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (int s = 1; s <= options.starts; ++s) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(prof.dim()));
        for (std::size_t i = 0; i < prof.dim(); ++i) {
            const double u = radical_inverse(static_cast<std::size_t>(s), kPrimes[i % 12]);
            x[i] = prof.lo()[i] + (0.1 + 0.8 * u) * (prof.hi()[i] - prof.lo()[i]);
        }
        starts.push_back(x);
    }

    RunResult best;
    bool have = false;
    for (const auto& x0 : starts) {
        auto run = newton_run(prof, x0, tol, options.max_iter, options.fd_step);
        if (!run.best.valid) continue;
        // Earlier starts (the caller's start first) win ties up to rounding.
        const double margin = 1e-10 * std::max(1.0, std::abs(best.best.value));
        const bool better = !have || (run.converged && !best.converged) ||
                            (run.converged == best.converged &&
                             run.best.value > best.best.value + margin);
        if (better) {
            best = std::move(run);
            have = true;
        }
    }

    WhittleFit fit;
    fit.tolerance = tol;
    if (!have) {
        fit.message = "no valid starting point inside the parameter box";
        return fit;
    }
    fit.beta_hat = best.best.beta;
    fit.loglik = best.best.value;
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    fit.score_norm = best.pg_norm;
    const auto parts = sandwich_covariance(spec, fit.beta_hat, pgram, options.fd_step);
    fit.cov_hat = parts.v_hat;
    if (!fit.converged)
        fit.message = "score norm above tolerance after search";
    else if (!fit.cov_hat)
        fit.message = "derivative matrix A is singular; covariance unavailable";
    else
        fit.message = "ok";
    return fit;
}

}  // namespace ael
