#include "degenlab/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace degenlab {

const char* to_string(FaceScheme scheme) {
    return scheme == FaceScheme::Upwind ? "upwind" : "arithmetic";
}

void SolverConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(picard_tol) || !positive(newton_tol) || !positive(min_step) || !positive(power_regularization) ||
        !positive(singular_margin))
        throw std::invalid_argument("solver tolerances must be positive");
    if (picard_max < 1 || newton_max < 1) throw std::invalid_argument("iteration caps must be positive");
    if (!positive(n_initial) || !(n_max >= n_initial)) throw std::invalid_argument("need 0 < n_initial <= n_max");
    if (relaxation_after < 0) throw std::invalid_argument("relaxation_after must be nonnegative");
}

std::vector<double> SolverConfig::n_schedule() const {
    std::vector<double> levels;
    for (double n = n_initial; n <= n_max; n *= 2.0) levels.push_back(n);
    return levels;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    const Eigen::Index m = size();
    Eigen::VectorXd out = diag.cwiseProduct(u);
    if (m > 1) {
        out.head(m - 1) += super.head(m - 1).cwiseProduct(u.tail(m - 1));
        out.tail(m - 1) += sub.tail(m - 1).cwiseProduct(u.head(m - 1));
    }
    return out;
}

Eigen::VectorXd tridiag_solve(const DiscreteOperator& op) {
    return tridiagonal_solve<double>(op.sub, op.diag, op.super, op.rhs);
}

Eigen::VectorXd face_coefficients(const RadialGrid& grid, const CoefficientSpec& coeff,
                                  const Eigen::Ref<const Eigen::VectorXd>& frozen, double n, FaceScheme scheme) {
    const Eigen::Index m = grid.size();
    if (frozen.size() != m) throw std::invalid_argument("frozen field size does not match grid");
    Eigen::VectorXd a(m + 1);
    a(0) = 0.0;
    for (Eigen::Index f = 1; f <= m; ++f) {
        const double left = frozen(f - 1);
        const double right = f < m ? frozen(f) : 0.0;
        const double r = grid.faces()(f);
        if (scheme == FaceScheme::Upwind) {
            const double star = std::abs(left) >= std::abs(right) ? left : right;
            a(f) = coefficient_eval(coeff, r, truncate(star, n));
        } else {
            a(f) = 0.5 * (coefficient_eval(coeff, r, truncate(left, n)) + coefficient_eval(coeff, r, truncate(right, n)));
        }
    }
    return a;
}

DiscreteOperator assemble_frozen(const RadialGrid& grid, const CoefficientSpec& coeff,
                                 const Eigen::Ref<const Eigen::VectorXd>& frozen, double n, FaceScheme scheme) {
    const Eigen::Index m = grid.size();
    const Eigen::VectorXd a = face_coefficients(grid, coeff, frozen, n, scheme);
    const int power = grid.dimension() - 1;

    // conductance of each face; the origin face carries no flux
    Eigen::VectorXd c(m + 1);
    c(0) = 0.0;
    for (Eigen::Index f = 1; f <= m; ++f)
        c(f) = std::pow(grid.faces()(f), power) * a(f) / grid.face_spacing(f);

    DiscreteOperator op;
    op.sub = Eigen::VectorXd::Zero(m);
    op.diag = Eigen::VectorXd::Zero(m);
    op.super = Eigen::VectorXd::Zero(m);
    op.rhs = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double vol = grid.shell_volume(i);
        op.diag(i) = (c(i) + c(i + 1)) / vol;
        if (i > 0) op.sub(i) = -c(i) / vol;
        if (i + 1 < m) op.super(i) = -c(i + 1) / vol;
    }
    return op;
}

namespace {

struct Absorption {
    const LowerOrderTerm& term;
    double eps;
    double margin;

    bool singular() const { return term.kind == LowerOrderKind::Singular; }

    double upper() const { return term.sigma - margin; }

    void clamp(Eigen::VectorXd& u) const {
        if (singular()) u = u.cwiseMax(0.0).cwiseMin(upper());
    }

    Eigen::VectorXd value(const Eigen::VectorXd& u) const {
        return u.unaryExpr([this](double s) { return lower_order_eval(term, s); });
    }

    Eigen::VectorXd slope(const Eigen::VectorXd& u) const {
        return u.unaryExpr([this](double s) { return lower_order_derivative(term, s, eps); });
    }
};

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

NewtonResult newton_semilinear(const DiscreteOperator& op, const LowerOrderTerm& lower,
                               const Eigen::Ref<const Eigen::VectorXd>& u0, const SolverConfig& cfg) {
    const Absorption g{lower, cfg.power_regularization, cfg.singular_margin};
    const double target = cfg.newton_tol * (1.0 + max_abs(op.rhs));

    NewtonResult out;
    out.u = u0;
    g.clamp(out.u);

    auto residual = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd { return op.apply(u) + g.value(u) - op.rhs; };

    Eigen::VectorXd res = residual(out.u);
    double norm = max_abs(res);
    if (!std::isfinite(norm)) throw std::runtime_error("non-finite residual in Newton iteration");

    while (norm > target) {
        if (out.iterations == cfg.newton_max) {
            out.hit_iteration_cap = true;
            break;
        }
        ++out.iterations;
        const Eigen::VectorXd diag = op.diag + g.slope(out.u);
        const Eigen::VectorXd step = tridiagonal_solve<double>(op.sub, diag, op.super, -res);

        bool improved = false;
        Eigen::VectorXd trial;
        Eigen::VectorXd trial_res;
        double trial_norm = norm;
        for (double t = 1.0; t >= cfg.min_step; t *= 0.5) {
            trial = out.u + t * step;
            g.clamp(trial);
            trial_res = residual(trial);
            trial_norm = max_abs(trial_res);
            if (trial_norm < norm) {
                improved = true;
                break;
            }
        }
        if (!std::isfinite(trial_norm)) throw std::runtime_error("non-finite residual in Newton iteration");
        if (!improved) break;  // stalled at the rounding floor
        out.u = std::move(trial);
        res = std::move(trial_res);
        norm = trial_norm;
    }
    out.residual_inf = norm;
    out.converged = norm <= target;
    return out;
}

DiscreteProblem discretize(const RadialGrid& grid, const ProblemSpec& spec) {
    spec.validate();
    if (grid.dimension() != spec.dimension || grid.radius() != spec.radius)
        throw std::invalid_argument("grid does not match the problem's dimension and radius");
    Eigen::VectorXd f = grid.nodes().unaryExpr([&](double r) { return datum_eval(spec.datum, r); });
    return {grid, spec.coefficient, spec.lower, std::move(f)};
}

double residual_norm(const DiscreteProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& u, double n,
                     FaceScheme scheme) {
    const DiscreteOperator op = assemble_frozen(problem.grid, problem.coefficient, u, n, scheme);
    Eigen::VectorXd res = op.apply(u) - truncate(problem.datum, n);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        try {
            res(i) += lower_order_eval(problem.lower, u(i));
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return max_abs(res);
}

Eigen::VectorXd manufactured_rhs(const RadialGrid& grid, const CoefficientSpec& coeff, const LowerOrderTerm& lower,
                                 const Eigen::Ref<const Eigen::VectorXd>& u_star, double n, FaceScheme scheme) {
    const DiscreteOperator op = assemble_frozen(grid, coeff, u_star, n, scheme);
    Eigen::VectorXd f = op.apply(u_star);
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) += lower_order_eval(lower, u_star(i));
    return f;
}

SolveResult picard_solve(const DiscreteProblem& problem, double n, const SolverConfig& cfg,
                         const Eigen::VectorXd* initial, std::ostream* trace) {
    cfg.validate();
    const Eigen::Index m = problem.grid.size();
    if (problem.datum.size() != m) throw std::invalid_argument("datum size does not match grid");

    const Eigen::VectorXd rhs = truncate(problem.datum, n);
    const double target = cfg.newton_tol * (1.0 + max_abs(rhs));

    SolveResult out;
    out.n_final = n;
    out.u = initial ? *initial : Eigen::VectorXd::Zero(m);
    if (problem.lower.kind == LowerOrderKind::Singular)
        out.u = out.u.cwiseMax(0.0).cwiseMin(problem.lower.sigma - cfg.singular_margin);

    char line[160];
    for (int k = 1; k <= cfg.picard_max; ++k) {
        DiscreteOperator op = assemble_frozen(problem.grid, problem.coefficient, out.u, n, cfg.face_scheme);
        op.rhs = rhs;
        NewtonResult step;
        try {
            step = newton_semilinear(op, problem.lower, out.u, cfg);
        } catch (const std::exception& e) {
            out.flags.aborted = true;
            out.message = e.what();
            out.residual_inf = std::numeric_limits<double>::infinity();
            return out;
        }
        out.picard_iters = k;
        out.newton_iters_total += step.iterations;

        Eigen::VectorXd next = std::move(step.u);
        const double previous_norm = max_abs(out.u);
        const double update = max_abs(next - out.u) / (1.0 + previous_norm);
        if (k > cfg.relaxation_after) next = 0.5 * (next + out.u);

        const double next_norm = max_abs(next);
        if (!std::isfinite(next_norm) || next_norm > 1e6 * (1.0 + previous_norm)) {
            out.flags.aborted = true;
            out.message = "diverging Picard iterates";
            out.residual_inf = std::numeric_limits<double>::infinity();
            return out;
        }
        out.u = std::move(next);
        out.residual_inf = residual_norm(problem, out.u, n, cfg.face_scheme);

        if (trace) {
            std::snprintf(line, sizeof line, "level %.17g, picard %d, newton %d, residual %.6e\n", n, k,
                          step.iterations, out.residual_inf);
            *trace << line;
        }
        if (update < cfg.picard_tol && out.residual_inf <= target) {
            out.flags.converged = true;
            return out;
        }
    }
    out.flags.hit_iteration_cap = true;
    out.message = "Picard iteration cap reached";
    return out;
}

SolveResult picard_solve(const RadialGrid& grid, const ProblemSpec& spec, double n, const SolverConfig& cfg) {
    return picard_solve(discretize(grid, spec), n, cfg);
}

SolveResult truncation_continuation(const DiscreteProblem& problem, const SolverConfig& cfg, std::ostream* trace) {
    cfg.validate();
    const double datum_max = max_abs(problem.datum);

    SolveResult out;
    out.u = Eigen::VectorXd::Zero(problem.grid.size());
    int picard_total = 0;
    int newton_total = 0;
    for (double n : cfg.n_schedule()) {
        const Eigen::VectorXd* start = cfg.warm_start ? &out.u : nullptr;
        SolveResult level = picard_solve(problem, n, cfg, start, trace);
        picard_total += level.picard_iters;
        newton_total += level.newton_iters_total;
        out = std::move(level);
        out.picard_iters = picard_total;
        out.newton_iters_total = newton_total;
        out.flags.truncation_active = !(n > max_abs(out.u) && n >= datum_max);
        if (!out.flags.converged || !out.flags.truncation_active) return out;
    }
    return out;
}

SolveResult truncation_continuation(const RadialGrid& grid, const ProblemSpec& spec, const SolverConfig& cfg,
                                    std::ostream* trace) {
    return truncation_continuation(discretize(grid, spec), cfg, trace);
}

}  // namespace degenlab
