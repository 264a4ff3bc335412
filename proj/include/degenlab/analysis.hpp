#ifndef DEGENLAB_ANALYSIS_HPP
#define DEGENLAB_ANALYSIS_HPP

#include "degenlab/grid.hpp"
#include "degenlab/problem_model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

namespace degenlab {

/// (sum_i w_i |u_i|^s)^{1/s}
template <typename DerivedU, typename DerivedW>
typename DerivedU::Scalar lebesgue_norm(const Eigen::MatrixBase<DerivedU>& u, typename DerivedU::Scalar s,
                                        const Eigen::MatrixBase<DerivedW>& w) {
    using std::pow;
    if (!(s > 0)) throw std::invalid_argument("lebesgue_norm requires s > 0");
    if (u.size() != w.size()) throw std::invalid_argument("lebesgue_norm: field and weights differ in size");
    const auto sum = w.dot(u.cwiseAbs().array().pow(s).matrix());
    return pow(sum, 1 / s);
}

/// mu(k) = sum of w_i over nodes with |u_i| >= k, sampled on increasing levels.
struct DistributionFunction {
    Eigen::VectorXd levels;
    Eigen::VectorXd measures;
    Eigen::VectorXi counts;  // number of nodes with |u_i| >= k
    double total_measure = 0.0;
};

/// `count` log-spaced levels on [lowest, 2 max|u|].
Eigen::VectorXd default_levels(double max_abs, int count = 48, double lowest = 1e-3);

DistributionFunction distribution_function(const Eigen::Ref<const Eigen::VectorXd>& u,
                                           const Eigen::Ref<const Eigen::VectorXd>& w,
                                           const Eigen::Ref<const Eigen::VectorXd>& levels);

/// max_k k^s mu(k) over the sampled levels.
double marcinkiewicz_constant(const DistributionFunction& df, double s);

struct TailFit {
    double exponent = std::nan("");
    double k_lo = std::nan("");
    double k_hi = std::nan("");
    double fit_quality = 0.0;  // coefficient of determination
    int levels_used = 0;
    bool sufficient = false;
    std::string note;
};

/// Least-squares slope of log mu against log k, negated, over the top
/// `window_fraction` of the levels that still have at least three nodes
/// above them. The tail is insufficient with fewer than five such levels,
/// a window narrower than two decades, or no decay across the window.
TailFit tail_exponent_fit(const DistributionFunction& df, double window_fraction = 0.4);

struct EstimateReport {
    std::string name;
    std::string parameters;
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_slack = 0.0;  // (rhs - lhs) / max(|rhs|, tiny)
    bool passed = false;
};

/// passed iff lhs <= rhs + tol * scale; scale defaults to |rhs|, which is
/// lhs <= rhs (1 + tol) for nonnegative right-hand sides.
EstimateReport make_report(std::string name, std::string parameters, double lhs, double rhs, double tol,
                           double scale = std::nan(""));

/// sum w |u|^{pm} <= sum w |f|^m
EstimateReport check_lemma_estimate(const Eigen::Ref<const Eigen::VectorXd>& u,
                                    const Eigen::Ref<const Eigen::VectorXd>& f, double p, double m,
                                    const Eigen::Ref<const Eigen::VectorXd>& w, double tol = 1e-4);

/// For each t: sum over {|u| > t} of w |u|^p <= sum over {|u| > t} of w |f|.
std::vector<EstimateReport> check_bg_estimate(const Eigen::Ref<const Eigen::VectorXd>& u,
                                              const Eigen::Ref<const Eigen::VectorXd>& f, double p,
                                              const std::vector<double>& t_levels,
                                              const Eigen::Ref<const Eigen::VectorXd>& w, double tol = 1e-4);

/// alpha (lambda - 1) sum_f W_f |Du_f|^2 (1 + max adjacent |u|)^{-gamma-lambda} <= sum w |f|
EstimateReport check_weighted_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                     const Eigen::Ref<const Eigen::VectorXd>& f, double gamma, double lambda,
                                     double alpha, double tol = 1e-4);

/// For each k: alpha sum_f W_f |D T_k(u)_f|^2 <= k (1 + k)^gamma sum w |f|.
std::vector<EstimateReport> check_truncation_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                                    const Eigen::Ref<const Eigen::VectorXd>& f, double gamma,
                                                    double alpha, const std::vector<double>& k_levels,
                                                    double tol = 1e-4);

/// 0 <= u <= h^{-1}(|f|_inf): lhs is max u, rhs the bound plus 1e-8. Fails
/// as well when min u < -1e-12.
EstimateReport check_linfty_bound(const Eigen::Ref<const Eigen::VectorXd>& u, const LowerOrderTerm& lower,
                                  const Eigen::Ref<const Eigen::VectorXd>& f);

/// alpha sum_f W_f |Du_f|^2 / (1 + sigma)^gamma <= sigma sum w |f|
EstimateReport check_singular_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                     const Eigen::Ref<const Eigen::VectorXd>& f, double gamma, double alpha,
                                     double sigma, double tol = 1e-4);

/// Bounded test function vanishing at r = R, for the entropy inequality.
struct EntropyTest {
    std::string label;
    Eigen::VectorXd phi;
};

/// phi = 0 and phi = c (1 - (r/R)^2) for c = +-max|u|/2.
std::vector<EntropyTest> default_entropy_tests(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u);

/// For each (phi, k):
///   sum_f W_f a_f Du_f D psi_f + sum w g(u) psi <= sum w f psi,  psi = T_k(u - phi),
/// with a_f = a(r_f, s*) upwinded on u. The tolerance is relative to the sum
/// of the absolute values of all three integrands.
std::vector<EstimateReport> check_entropy_inequality(const RadialGrid& grid,
                                                     const Eigen::Ref<const Eigen::VectorXd>& u,
                                                     const ProblemSpec& spec,
                                                     const std::vector<EntropyTest>& tests,
                                                     const std::vector<double>& k_levels, double tol = 1e-4);

/// Discrete Dirichlet energy sum_f W_f |D v_f|^2.
double dirichlet_energy(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& v);

/// Distribution of |grad u| over the faces with face weights.
DistributionFunction gradient_distribution(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u);

struct MarcinkiewiczLemmaReport {
    bool applicable = false;
    double s = std::nan("");          // tail exponent of u
    double rho = std::nan("");        // growth of the truncated energies
    double predicted = std::nan("");  // 2s / (rho + s)
    double measured = std::nan("");   // tail exponent of |grad u|
    bool passed = false;
    TailFit u_fit;
    TailFit gradient_fit;
    std::string note;
};

/// Measures s from the tail of u, fits rho from log E(T_k u) against log k on
/// the same window, and compares the gradient tail with 2s/(rho + s).
/// Passes when measured >= predicted (1 - tol_exponent).
MarcinkiewiczLemmaReport verify_marcinkiewicz_lemma(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                                                    double tol_exponent = 0.15);

/// Least-squares fit of y = a + b x; returns {b, a, r^2}.
struct LineFit {
    double slope;
    double intercept;
    double r_squared;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace degenlab

#endif  // DEGENLAB_ANALYSIS_HPP
