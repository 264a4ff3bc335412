#ifndef DEGENLAB_SOLVER_HPP
#define DEGENLAB_SOLVER_HPP

#include "degenlab/grid.hpp"
#include "degenlab/problem_model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace degenlab {

/// How the frozen coefficient is sampled on a face.
///  - Upwind:     a(r_f, T_n(s*)) with s* the adjacent value of larger |u|
///  - Arithmetic: mean of a(r_f, T_n(u)) over the two adjacent values
enum class FaceScheme { Upwind, Arithmetic };

const char* to_string(FaceScheme scheme);

struct SolverConfig {
    double picard_tol = 1e-8;
    int picard_max = 200;
    double newton_tol = 1e-10;
    int newton_max = 50;
    double min_step = 0x1p-20;
    double n_initial = 1.0;
    double n_max = 0x1p30;
    double power_regularization = 1e-10;
    double singular_margin = 1e-12;
    int relaxation_after = 30;
    FaceScheme face_scheme = FaceScheme::Upwind;
    bool warm_start = true;

    void validate() const;

    /// Truncation levels n_initial * 2^j up to n_max.
    std::vector<double> n_schedule() const;
};

/// Tridiagonal system: row i reads sub(i) u(i-1) + diag(i) u(i) + super(i) u(i+1).
/// sub(0) and super(M-1) are zero.
struct DiscreteOperator {
    Eigen::VectorXd sub;
    Eigen::VectorXd diag;
    Eigen::VectorXd super;
    Eigen::VectorXd rhs;

    Eigen::Index size() const { return diag.size(); }
    Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& u) const;
};

/// Thrown on a zero or non-finite pivot.
class SingularAssembly : public std::runtime_error {
public:
    explicit SingularAssembly(Eigen::Index row)
        : std::runtime_error("zero pivot in tridiagonal elimination at row " + std::to_string(row)) {}
};

/// Thomas algorithm.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tridiagonal_solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sub,
                                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& super,
                                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs) {
    using std::isfinite;
    const Eigen::Index m = diag.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(m), x(m);
    Scalar pivot = diag(0);
    if (pivot == Scalar(0) || !isfinite(pivot)) throw SingularAssembly(0);
    c(0) = m > 1 ? super(0) / pivot : Scalar(0);
    x(0) = rhs(0) / pivot;
    for (Eigen::Index i = 1; i < m; ++i) {
        pivot = diag(i) - sub(i) * c(i - 1);
        if (pivot == Scalar(0) || !isfinite(pivot)) throw SingularAssembly(i);
        c(i) = i + 1 < m ? super(i) / pivot : Scalar(0);
        x(i) = (rhs(i) - sub(i) * x(i - 1)) / pivot;
    }
    for (Eigen::Index i = m - 2; i >= 0; --i) x(i) -= c(i) * x(i + 1);
    return x;
}

Eigen::VectorXd tridiag_solve(const DiscreteOperator& op);

/// Face values a_f of the frozen coefficient on faces 0..M (a_0 = 0).
Eigen::VectorXd face_coefficients(const RadialGrid& grid, const CoefficientSpec& coeff,
                                  const Eigen::Ref<const Eigen::VectorXd>& frozen, double n,
                                  FaceScheme scheme = FaceScheme::Upwind);

/// Conservative flux form of -div(a(r, T_n(frozen)) grad u): row i is
/// -(F_{i+1/2} - F_{i-1/2}) / V_i with F_f = rho_f^{N-1} a_f (u_+ - u_-)/spacing_f,
/// V_i the shell volume, zero flux at the origin and a ghost value 0 at R.
/// The right-hand side is left at zero.
DiscreteOperator assemble_frozen(const RadialGrid& grid, const CoefficientSpec& coeff,
                                 const Eigen::Ref<const Eigen::VectorXd>& frozen, double n,
                                 FaceScheme scheme = FaceScheme::Upwind);

struct NewtonResult {
    Eigen::VectorXd u;
    int iterations = 0;
    double residual_inf = 0.0;
    bool converged = false;
    bool hit_iteration_cap = false;
};

/// Solves L u + g(u) = rhs by damped Newton with Jacobian L + diag(g'(u)).
/// Steps are halved until the max-norm residual decreases. Singular iterates
/// are clamped to [0, sigma - singular_margin].
NewtonResult newton_semilinear(const DiscreteOperator& op, const LowerOrderTerm& lower,
                               const Eigen::Ref<const Eigen::VectorXd>& u0, const SolverConfig& cfg);

/// Discrete data for one problem on one grid.
struct DiscreteProblem {
    RadialGrid grid;
    CoefficientSpec coefficient;
    LowerOrderTerm lower;
    Eigen::VectorXd datum;  // f at the nodes
};

DiscreteProblem discretize(const RadialGrid& grid, const ProblemSpec& spec);

struct SolveFlags {
    bool converged = false;
    bool truncation_active = false;
    bool hit_iteration_cap = false;
    bool aborted = false;
};

struct SolveResult {
    Eigen::VectorXd u;
    double n_final = 0.0;
    int picard_iters = 0;
    int newton_iters_total = 0;
    double residual_inf = 0.0;
    SolveFlags flags;
    std::string message;
};

/// Picard iteration u <- newton(assemble_frozen(u)) at fixed truncation
/// level n, until the relative update drops below picard_tol and the
/// self-consistent residual below newton_tol (1 + |T_n f|_inf). Iterates are
/// averaged with their predecessor after relaxation_after iterations.
/// Optional trace lines: "level n, picard k, newton j, residual r".
SolveResult picard_solve(const DiscreteProblem& problem, double n, const SolverConfig& cfg,
                         const Eigen::VectorXd* initial = nullptr, std::ostream* trace = nullptr);

SolveResult picard_solve(const RadialGrid& grid, const ProblemSpec& spec, double n, const SolverConfig& cfg);

/// Solves along the truncation schedule, warm-starting each level from the
/// previous one, and stops once n > max |u_i| and n >= max |f_i|.
SolveResult truncation_continuation(const DiscreteProblem& problem, const SolverConfig& cfg,
                                    std::ostream* trace = nullptr);

SolveResult truncation_continuation(const RadialGrid& grid, const ProblemSpec& spec, const SolverConfig& cfg,
                                    std::ostream* trace = nullptr);

/// |A_n(u) u + g(u) - T_n(f)|_inf with the coefficient frozen at u itself.
/// +infinity when u leaves the domain of a singular absorption.
double residual_norm(const DiscreteProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& u, double n,
                     FaceScheme scheme = FaceScheme::Upwind);

/// f_h = A_n(u*) u* + g(u*), so that u* solves the discrete problem with datum f_h.
Eigen::VectorXd manufactured_rhs(const RadialGrid& grid, const CoefficientSpec& coeff, const LowerOrderTerm& lower,
                                 const Eigen::Ref<const Eigen::VectorXd>& u_star, double n,
                                 FaceScheme scheme = FaceScheme::Upwind);

}  // namespace degenlab

#endif  // DEGENLAB_SOLVER_HPP
