#ifndef DEGENLAB_PROBLEM_MODEL_HPP
#define DEGENLAB_PROBLEM_MODEL_HPP

#include <stdexcept>
#include <string>

namespace degenlab {

/// Shape of the diffusion coefficient a(r, s).
///  - Sharp:  a = alpha / (1 + |s|)^gamma
///  - Scaled: a = min(beta, b(r) * alpha / (1 + |s|)^gamma),
///            b(r) = 1 + spatial_amplitude * r^2 / (1 + r^2)
enum class CoefficientForm { Sharp, Scaled };

struct CoefficientSpec {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 0.0;
    CoefficientForm form = CoefficientForm::Sharp;
    double spatial_amplitude = 0.0;

    /// Bounded radial factor b(r), 1 <= b(r) < 1 + spatial_amplitude.
    double spatial_factor(double r) const;
    void validate() const;
};

/// a(r, s). Always lies in [alpha / (1 + |s|)^gamma, beta].
double coefficient_eval(const CoefficientSpec& spec, double r, double s);

/// Lower bound alpha / (1 + |s|)^gamma of the coefficient.
double coefficient_floor(const CoefficientSpec& spec, double s);

enum class LowerOrderKind { None, Power, Singular };

/// Zeroth-order absorption g(u): nothing, |u|^{p-1} u, or the singular
/// h(u) = u / (sigma - u) defined on [0, sigma).
struct LowerOrderTerm {
    LowerOrderKind kind = LowerOrderKind::None;
    double exponent = 1.0;  // p, Power only
    double sigma = 1.0;     // Singular only

    static LowerOrderTerm none() { return {}; }
    static LowerOrderTerm power(double p);
    static LowerOrderTerm singular(double sigma);

    void validate() const;
};

double lower_order_eval(const LowerOrderTerm& term, double s);

/// dg/ds. For Power with p < 1 the derivative is regularized as
/// p (|s| + eps)^{p-1}; eps is ignored otherwise.
double lower_order_derivative(const LowerOrderTerm& term, double s, double eps = 0.0);

/// h^{-1}(y) for the Singular term: y sigma / (1 + y).
double lower_order_inverse(const LowerOrderTerm& term, double y);

enum class DatumFamily { Constant, RadialPower, Bump };

/// Radial datum f(r).
///  - Constant:    A
///  - RadialPower: A r^{-delta}
///  - Bump:        A (1 - ((r - center)/width)^2)^2 inside |r - center| < width, else 0
struct DatumSpec {
    DatumFamily family = DatumFamily::Constant;
    double amplitude = 1.0;
    double delta = 0.0;
    double center = 0.0;
    double width = 0.5;
    double m = 1.0;  // claimed Lebesgue class

    void validate() const;
};

/// Raised by datum_eval when a RadialPower datum is asked for its value at
/// the origin; evaluate at cell centers only.
class SingularOrigin : public std::domain_error {
public:
    SingularOrigin() : std::domain_error("radial power datum is singular at r = 0; evaluate at cell centers only") {}
};

double datum_eval(const DatumSpec& spec, double r);

/// \int_{B_R} |f|^m dx over the ball of radius R in R^N, +infinity when the
/// datum is not in L^m. Closed form for Constant and RadialPower; composite
/// Simpson over the support for Bump.
double datum_norm_exact(const DatumSpec& spec, double m, int dimension, double radius);

struct ProblemSpec {
    int dimension = 3;
    double radius = 1.0;
    CoefficientSpec coefficient;
    LowerOrderTerm lower;
    DatumSpec datum;

    void validate() const;
};

/// Surface measure of the unit sphere in R^N, 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_measure(int dimension);

enum class RegimeCase { DistributionalSobolev, Entropy, FiniteEnergy };

enum class GradientSpace {
    SobolevStrict,  // |grad u| in L^s for every s below the exponent
    Sobolev,        // u in W^{1,exponent}_0
    Marcinkiewicz,  // |grad u| in M^{exponent}
    H1
};

struct RegimePrediction {
    RegimeCase regime = RegimeCase::Entropy;
    double lebesgue_exponent = 0.0;
    double gradient_exponent = 0.0;
    GradientSpace gradient_space = GradientSpace::Marcinkiewicz;
};

/// Which existence case applies to -div(a(x,u) grad u) + |u|^{p-1} u = f
/// with f in L^m. Boundaries follow the theorem statements:
///   m = 1: p > gamma + 1 is distributional, otherwise entropy.
///   m > 1: p >= (gamma + 1)/(m - 1) finite energy,
///          gamma/(m - 1) < p < (gamma + 1)/(m - 1) distributional,
///          p <= gamma/(m - 1) entropy.
RegimePrediction classify_regime(double gamma, double p, double m);

/// The regime boundaries in p for fixed (gamma, m): {gamma + 1} when m = 1,
/// {gamma/(m-1), (gamma+1)/(m-1)} when m > 1. Empty entries are NaN.
struct RegimeBoundaries {
    double lower;
    double upper;
};
RegimeBoundaries regime_boundaries(double gamma, double m);

const char* to_string(RegimeCase c);
const char* to_string(GradientSpace g);
const char* to_string(LowerOrderKind k);
const char* to_string(DatumFamily f);

/// Exponents of the problem without absorption, for comparison reports.
struct BaselineExponents {
    double r;
    double q;
    double m_threshold_low;   // N / (N + 1 - gamma (N - 1))
    double m_threshold_mid;   // 2N / (N (1 - gamma) + 2 (gamma + 1))
};

/// Raised by baseline_exponents when m > N/2: the solution is then bounded
/// and the summability exponents no longer apply.
class BoundedRegime : public std::domain_error {
public:
    BoundedRegime() : std::domain_error("m > N/2: baseline solution is bounded (H^1_0 and L^infinity)") {}
};

BaselineExponents baseline_exponents(double gamma, double m, int dimension);

}  // namespace degenlab

#endif  // DEGENLAB_PROBLEM_MODEL_HPP
