#include "degenlab/analysis.hpp"

#include "degenlab/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace degenlab {

namespace {

std::string format_params(const char* fmt, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, a);
    return buf;
}

std::string format_params(const char* fmt, double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": inputs live on different grids");
}

double sum_abs_pow(const Eigen::Ref<const Eigen::VectorXd>& v, double s, const Eigen::Ref<const Eigen::VectorXd>& w) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) total += w(i) * std::pow(std::abs(v(i)), s);
    return total;
}

}  // namespace

Eigen::VectorXd default_levels(double max_abs, int count, double lowest) {
    if (count < 2) throw std::invalid_argument("need at least two levels");
    const double highest = std::max(2.0 * max_abs, 2.0 * lowest);
    return Eigen::VectorXd::LinSpaced(count, std::log(lowest), std::log(highest)).array().exp().matrix();
}

DistributionFunction distribution_function(const Eigen::Ref<const Eigen::VectorXd>& u,
                                           const Eigen::Ref<const Eigen::VectorXd>& w,
                                           const Eigen::Ref<const Eigen::VectorXd>& levels) {
    require_same_size(u.size(), w.size(), "distribution_function");
    for (Eigen::Index j = 0; j < levels.size(); ++j) {
        if (!(levels(j) > 0.0)) throw std::invalid_argument("distribution levels must be positive");
        if (j > 0 && !(levels(j) > levels(j - 1))) throw std::invalid_argument("distribution levels must increase");
    }
    DistributionFunction df;
    df.levels = levels;
    df.measures = Eigen::VectorXd::Zero(levels.size());
    df.counts = Eigen::VectorXi::Zero(levels.size());
    df.total_measure = w.sum();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u(i));
        for (Eigen::Index j = 0; j < levels.size() && a >= levels(j); ++j) {
            df.measures(j) += w(i);
            df.counts(j) += 1;
        }
    }
    return df;
}

double marcinkiewicz_constant(const DistributionFunction& df, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("marcinkiewicz_constant requires s > 0");
    double best = 0.0;
    for (Eigen::Index j = 0; j < df.levels.size(); ++j)
        best = std::max(best, std::pow(df.levels(j), s) * df.measures(j));
    return best;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - fit.slope * sxy;
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

TailFit tail_exponent_fit(const DistributionFunction& df, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw std::invalid_argument("window fraction must lie in (0, 1]");
    TailFit fit;
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index j = 0; j < df.levels.size(); ++j)
        if (df.counts(j) >= 3 && df.measures(j) > 0.0) candidates.push_back(j);

    const auto wanted = static_cast<size_t>(std::ceil(window_fraction * candidates.size()));
    const size_t used = std::min(candidates.size(), std::max<size_t>(wanted, 5));
    if (used < 5) {
        fit.note = "insufficient tail: fewer than 5 resolved levels";
        return fit;
    }
    std::vector<double> x, y;
    for (size_t j = candidates.size() - used; j < candidates.size(); ++j) {
        x.push_back(std::log(df.levels(candidates[j])));
        y.push_back(std::log(df.measures(candidates[j])));
    }
    fit.levels_used = static_cast<int>(used);
    fit.k_lo = std::exp(x.front());
    fit.k_hi = std::exp(x.back());
    const LineFit line = fit_line(x, y);
    fit.exponent = -line.slope;
    fit.fit_quality = line.r_squared;

    if (fit.k_hi / fit.k_lo < 100.0) {
        fit.note = "insufficient tail: window spans less than two decades";
    } else if (!(y.back() < y.front())) {
        fit.note = "insufficient tail: no decay across the window";
    } else {
        fit.sufficient = true;
    }
    return fit;
}

EstimateReport make_report(std::string name, std::string parameters, double lhs, double rhs, double tol,
                           double scale) {
    EstimateReport r;
    r.name = std::move(name);
    r.parameters = std::move(parameters);
    r.lhs = lhs;
    r.rhs = rhs;
    constexpr double tiny = std::numeric_limits<double>::min();
    r.relative_slack = (rhs - lhs) / std::max(std::abs(rhs), tiny);
    if (std::isnan(scale)) scale = std::abs(rhs);
    r.passed = lhs <= rhs + tol * scale;
    return r;
}

EstimateReport check_lemma_estimate(const Eigen::Ref<const Eigen::VectorXd>& u,
                                    const Eigen::Ref<const Eigen::VectorXd>& f, double p, double m,
                                    const Eigen::Ref<const Eigen::VectorXd>& w, double tol) {
    require_same_size(u.size(), w.size(), "check_lemma_estimate");
    require_same_size(f.size(), w.size(), "check_lemma_estimate");
    const double lhs = sum_abs_pow(u, p * m, w);
    const double rhs = sum_abs_pow(f, m, w);
    return make_report("lemma", format_params("p=%g m=%g", p, m), lhs, rhs, tol);
}

std::vector<EstimateReport> check_bg_estimate(const Eigen::Ref<const Eigen::VectorXd>& u,
                                              const Eigen::Ref<const Eigen::VectorXd>& f, double p,
                                              const std::vector<double>& t_levels,
                                              const Eigen::Ref<const Eigen::VectorXd>& w, double tol) {
    require_same_size(u.size(), w.size(), "check_bg_estimate");
    require_same_size(f.size(), w.size(), "check_bg_estimate");
    std::vector<EstimateReport> out;
    for (double t : t_levels) {
        double lhs = 0.0, rhs = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            if (std::abs(u(i)) > t) {
                lhs += w(i) * std::pow(std::abs(u(i)), p);
                rhs += w(i) * std::abs(f(i));
            }
        }
        out.push_back(make_report("bg", format_params("t=%.6g", t), lhs, rhs, tol));
    }
    return out;
}

double dirichlet_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& v) {
    return face_weights(grid).dot(face_gradient(grid, v).cwiseAbs2());
}

EstimateReport check_weighted_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                     const Eigen::Ref<const Eigen::VectorXd>& f, double gamma, double lambda,
                                     double alpha, double tol) {
    if (!(lambda > 1.0)) throw std::invalid_argument("weighted energy check requires lambda > 1");
    require_same_size(u.size(), grid.size(), "check_weighted_energy");
    require_same_size(f.size(), grid.size(), "check_weighted_energy");
    const Eigen::VectorXd grad = face_gradient(grid, u);
    const Eigen::VectorXd wf = face_weights(grid);
    const Eigen::Index m = grid.size();
    double energy = 0.0;
    for (Eigen::Index k = 1; k <= m; ++k) {
        const double left = std::abs(u(k - 1));
        const double right = k < m ? std::abs(u(k)) : 0.0;
        energy += wf(k) * grad(k) * grad(k) * std::pow(1.0 + std::max(left, right), -gamma - lambda);
    }
    const double lhs = alpha * (lambda - 1.0) * energy;
    const double rhs = sum_abs_pow(f, 1.0, quadrature_weights(grid));
    return make_report("weighted_energy", format_params("lambda=%g", lambda), lhs, rhs, tol);
}

std::vector<EstimateReport> check_truncation_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                                    const Eigen::Ref<const Eigen::VectorXd>& f, double gamma,
                                                    double alpha, const std::vector<double>& k_levels, double tol) {
    require_same_size(u.size(), grid.size(), "check_truncation_energy");
    require_same_size(f.size(), grid.size(), "check_truncation_energy");
    const double f_l1 = sum_abs_pow(f, 1.0, quadrature_weights(grid));
    std::vector<EstimateReport> out;
    for (double k : k_levels) {
        const double lhs = alpha * dirichlet_energy(grid, truncate(Eigen::VectorXd(u), k));
        const double rhs = k * std::pow(1.0 + k, gamma) * f_l1;
        out.push_back(make_report("truncation_energy", format_params("k=%.6g", k), lhs, rhs, tol));
    }
    return out;
}

EstimateReport check_linfty_bound(const Eigen::Ref<const Eigen::VectorXd>& u, const LowerOrderTerm& lower,
                                  const Eigen::Ref<const Eigen::VectorXd>& f) {
    const double f_inf = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    const double bound = lower_order_inverse(lower, f_inf);
    const double max_u = u.size() ? u.maxCoeff() : 0.0;
    const double min_u = u.size() ? u.minCoeff() : 0.0;
    EstimateReport r = make_report("linfty", format_params("sigma=%g bound=%.17g", lower.sigma, bound), max_u,
                                   bound + 1e-8, 0.0);
    r.passed = r.passed && min_u >= -1e-12;
    return r;
}

EstimateReport check_singular_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                     const Eigen::Ref<const Eigen::VectorXd>& f, double gamma, double alpha,
                                     double sigma, double tol) {
    require_same_size(u.size(), grid.size(), "check_singular_energy");
    const double lhs = alpha * dirichlet_energy(grid, u) / std::pow(1.0 + sigma, gamma);
    const double rhs = sigma * sum_abs_pow(f, 1.0, quadrature_weights(grid));
    return make_report("singular_energy", format_params("sigma=%g", sigma), lhs, rhs, tol);
}

std::vector<EntropyTest> default_entropy_tests(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u) {
    const double c = 0.5 * (u.size() ? u.cwiseAbs().maxCoeff() : 0.0);
    const double r2 = grid.radius() * grid.radius();
    const Eigen::VectorXd bubble = (1.0 - grid.nodes().array().square() / r2).matrix();
    return {{"phi=0", Eigen::VectorXd::Zero(grid.size())},
            {"phi=+c(1-r^2)", c * bubble},
            {"phi=-c(1-r^2)", -c * bubble}};
}

std::vector<EstimateReport> check_entropy_inequality(const RadialGrid& grid,
                                                     const Eigen::Ref<const Eigen::VectorXd>& u,
                                                     const ProblemSpec& spec,
                                                     const std::vector<EntropyTest>& tests,
                                                     const std::vector<double>& k_levels, double tol) {
    require_same_size(u.size(), grid.size(), "check_entropy_inequality");
    const Eigen::Index m = grid.size();
    const Eigen::VectorXd w = quadrature_weights(grid);
    const Eigen::VectorXd wf = face_weights(grid);
    const Eigen::VectorXd f = grid.nodes().unaryExpr([&](double r) { return datum_eval(spec.datum, r); });
    const Eigen::VectorXd a =
        face_coefficients(grid, spec.coefficient, u, std::numeric_limits<double>::infinity(), FaceScheme::Upwind);
    const Eigen::VectorXd grad_u = face_gradient(grid, u);
    Eigen::VectorXd g(m);
    for (Eigen::Index i = 0; i < m; ++i) g(i) = lower_order_eval(spec.lower, u(i));

    std::vector<EstimateReport> out;
    for (const EntropyTest& test : tests) {
        require_same_size(test.phi.size(), m, "check_entropy_inequality");
        const Eigen::VectorXd diff = u - test.phi;
        for (double k : k_levels) {
            const Eigen::VectorXd psi = truncate(diff, k);
            const Eigen::VectorXd grad_psi = face_gradient(grid, psi);
            double diffusion = 0.0, absorption = 0.0, source = 0.0, scale = 0.0;
            for (Eigen::Index fc = 1; fc <= m; ++fc) {
                const double term = wf(fc) * a(fc) * grad_u(fc) * grad_psi(fc);
                diffusion += term;
                scale += std::abs(term);
            }
            for (Eigen::Index i = 0; i < m; ++i) {
                absorption += w(i) * g(i) * psi(i);
                source += w(i) * f(i) * psi(i);
                scale += std::abs(w(i) * g(i) * psi(i)) + std::abs(w(i) * f(i) * psi(i));
            }
            out.push_back(make_report("entropy", test.label + format_params(" k=%.6g", k), diffusion + absorption,
                                      source, tol, scale));
        }
    }
    return out;
}

DistributionFunction gradient_distribution(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u) {
    const Eigen::VectorXd grad = face_gradient(grid, u).cwiseAbs();
    return distribution_function(grad, face_weights(grid), default_levels(grad.maxCoeff()));
}

MarcinkiewiczLemmaReport verify_marcinkiewicz_lemma(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                                    double tol_exponent) {
    require_same_size(u.size(), grid.size(), "verify_marcinkiewicz_lemma");
    MarcinkiewiczLemmaReport rep;
    const DistributionFunction df =
        distribution_function(u, quadrature_weights(grid), default_levels(u.cwiseAbs().maxCoeff()));
    rep.u_fit = tail_exponent_fit(df);
    if (!rep.u_fit.sufficient) {
        rep.note = "not applicable: " + rep.u_fit.note;
        return rep;
    }
    rep.s = rep.u_fit.exponent;

    std::vector<double> log_k, log_energy;
    const Eigen::VectorXd values = u;
    for (Eigen::Index j = 0; j < df.levels.size(); ++j) {
        const double k = df.levels(j);
        if (k < rep.u_fit.k_lo || k > rep.u_fit.k_hi) continue;
        const double e = dirichlet_energy(grid, truncate(values, k));
        if (e <= 0.0) continue;
        log_k.push_back(std::log(k));
        log_energy.push_back(std::log(e));
    }
    if (log_k.size() < 2) {
        rep.note = "not applicable: truncated energies vanish on the tail window";
        return rep;
    }
    rep.rho = fit_line(log_k, log_energy).slope;
    if (!(rep.rho > 0.0)) {
        rep.note = "not applicable: truncated energies do not grow with k";
        return rep;
    }
    rep.applicable = true;
    rep.predicted = 2.0 * rep.s / (rep.rho + rep.s);
    rep.gradient_fit = tail_exponent_fit(gradient_distribution(grid, u));
    if (!rep.gradient_fit.sufficient) {
        rep.note = "gradient " + rep.gradient_fit.note;
        return rep;
    }
    rep.measured = rep.gradient_fit.exponent;
    rep.passed = rep.measured >= rep.predicted * (1.0 - tol_exponent);
    return rep;
}

}  // namespace degenlab
