#include "degenlab/problem_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace degenlab {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

double CoefficientSpec::spatial_factor(double r) const {
    if (form == CoefficientForm::Sharp) return 1.0;
    const double r2 = r * r;
    return 1.0 + spatial_amplitude * r2 / (1.0 + r2);
}

void CoefficientSpec::validate() const {
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
    require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
    require(alpha <= beta, "alpha must not exceed beta");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be nonnegative");
    require(std::isfinite(spatial_amplitude) && spatial_amplitude >= 0.0,
            "spatial_amplitude must be nonnegative");
}

double coefficient_floor(const CoefficientSpec& spec, double s) {
    return spec.alpha / std::pow(1.0 + std::abs(s), spec.gamma);
}

double coefficient_eval(const CoefficientSpec& spec, double r, double s) {
    const double base = coefficient_floor(spec, s);
    if (spec.form == CoefficientForm::Sharp) return base;
    return std::min(spec.beta, spec.spatial_factor(r) * base);
}

LowerOrderTerm LowerOrderTerm::power(double p) {
    LowerOrderTerm t;
    t.kind = LowerOrderKind::Power;
    t.exponent = p;
    return t;
}

LowerOrderTerm LowerOrderTerm::singular(double sigma) {
    LowerOrderTerm t;
    t.kind = LowerOrderKind::Singular;
    t.sigma = sigma;
    return t;
}

void LowerOrderTerm::validate() const {
    if (kind == LowerOrderKind::Power)
        require(std::isfinite(exponent) && exponent > 0.0, "power exponent p must be positive");
    if (kind == LowerOrderKind::Singular)
        require(std::isfinite(sigma) && sigma > 0.0, "singular asymptote sigma must be positive");
}

double lower_order_eval(const LowerOrderTerm& term, double s) {
    switch (term.kind) {
    case LowerOrderKind::None:
        return 0.0;
    case LowerOrderKind::Power:
        if (s == 0.0) return 0.0;
        return std::copysign(std::pow(std::abs(s), term.exponent), s);
    case LowerOrderKind::Singular:
        if (!(s >= 0.0 && s < term.sigma))
            throw std::domain_error("singular absorption evaluated outside [0, sigma)");
        return s / (term.sigma - s);
    }
    return 0.0;
}

double lower_order_derivative(const LowerOrderTerm& term, double s, double eps) {
    switch (term.kind) {
    case LowerOrderKind::None:
        return 0.0;
    case LowerOrderKind::Power: {
        const double p = term.exponent;
        if (p == 1.0) return 1.0;
        const double base = p < 1.0 ? std::abs(s) + eps : std::abs(s);
        return p * std::pow(base, p - 1.0);
    }
    case LowerOrderKind::Singular: {
        if (!(s >= 0.0 && s < term.sigma))
            throw std::domain_error("singular absorption evaluated outside [0, sigma)");
        const double gap = term.sigma - s;
        return term.sigma / (gap * gap);
    }
    }
    return 0.0;
}

double lower_order_inverse(const LowerOrderTerm& term, double y) {
    if (term.kind != LowerOrderKind::Singular)
        throw std::invalid_argument("lower_order_inverse requires the singular term");
    if (!(y >= 0.0)) throw std::domain_error("lower_order_inverse requires y >= 0");
    if (std::isinf(y)) return term.sigma;
    return y * term.sigma / (1.0 + y);
}

void DatumSpec::validate() const {
    require(std::isfinite(amplitude), "datum amplitude must be finite");
    require(std::isfinite(m) && m >= 1.0, "datum class m must be >= 1");
    if (family == DatumFamily::RadialPower)
        require(std::isfinite(delta) && delta >= 0.0, "radial power delta must be nonnegative");
    if (family == DatumFamily::Bump) {
        require(std::isfinite(width) && width > 0.0, "bump width must be positive");
        require(std::isfinite(center) && center >= 0.0, "bump center must be nonnegative");
    }
}

double datum_eval(const DatumSpec& spec, double r) {
    if (r < 0.0) throw std::domain_error("datum evaluated at negative radius");
    switch (spec.family) {
    case DatumFamily::Constant:
        return spec.amplitude;
    case DatumFamily::RadialPower:
        if (spec.delta == 0.0) return spec.amplitude;
        if (r == 0.0) throw SingularOrigin();
        return spec.amplitude * std::pow(r, -spec.delta);
    case DatumFamily::Bump: {
        const double x = (r - spec.center) / spec.width;
        if (std::abs(x) >= 1.0) return 0.0;
        const double b = 1.0 - x * x;
        return spec.amplitude * b * b;
    }
    }
    return 0.0;
}

double unit_sphere_measure(int dimension) {
    const double half = 0.5 * dimension;
    return std::exp(std::log(2.0) + half * std::log(std::numbers::pi) - std::lgamma(half));
}

double datum_norm_exact(const DatumSpec& spec, double m, int dimension, double radius) {
    require(m >= 1.0, "datum_norm_exact requires m >= 1");
    const double omega = unit_sphere_measure(dimension);
    const double n = dimension;
    const double a = std::abs(spec.amplitude);
    switch (spec.family) {
    case DatumFamily::Constant:
        return std::pow(a, m) * omega * std::pow(radius, n) / n;
    case DatumFamily::RadialPower: {
        if (a == 0.0) return 0.0;
        const double e = n - spec.delta * m;
        if (e <= 0.0) return std::numeric_limits<double>::infinity();
        return omega * std::pow(a, m) * std::pow(radius, e) / e;
    }
    case DatumFamily::Bump: {
        const double lo = std::max(0.0, spec.center - spec.width);
        const double hi = std::min(radius, spec.center + spec.width);
        if (hi <= lo) return 0.0;
        constexpr int panels = 20000;
        const double h = (hi - lo) / panels;
        auto integrand = [&](double r) {
            return std::pow(std::abs(datum_eval(spec, r)), m) * std::pow(r, n - 1.0);
        };
        double sum = integrand(lo) + integrand(hi);
        for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(lo + i * h);
        return omega * sum * h / 3.0;
    }
    }
    return 0.0;
}

void ProblemSpec::validate() const {
    require(dimension >= 3, "dimension must be >= 3");
    require(std::isfinite(radius) && radius > 0.0, "radius must be positive");
    coefficient.validate();
    lower.validate();
    datum.validate();
    if (lower.kind == LowerOrderKind::Singular) {
        require(datum.amplitude >= 0.0, "singular absorption requires a nonnegative datum");
    }
    if (datum.family == DatumFamily::RadialPower && datum.amplitude != 0.0)
        require(datum.delta * datum.m < dimension, "radial power datum with delta * m >= N is not in L^m");
}

RegimeBoundaries regime_boundaries(double gamma, double m) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (m == 1.0) return {gamma + 1.0, nan};
    return {gamma / (m - 1.0), (gamma + 1.0) / (m - 1.0)};
}

RegimePrediction classify_regime(double gamma, double p, double m) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("classify_regime requires gamma >= 0");
    if (!(p > 0.0)) throw std::invalid_argument("classify_regime requires p > 0");
    if (!(m >= 1.0)) throw std::invalid_argument("classify_regime requires m >= 1");

    RegimePrediction out;
    out.lebesgue_exponent = p * m;
    const double sobolev = 2.0 * p * m / (gamma + 1.0 + p);

    if (m == 1.0) {
        out.gradient_exponent = sobolev;
        if (p > gamma + 1.0) {
            out.regime = RegimeCase::DistributionalSobolev;
            out.gradient_space = GradientSpace::SobolevStrict;
        } else {
            out.regime = RegimeCase::Entropy;
            out.gradient_space = GradientSpace::Marcinkiewicz;
        }
        return out;
    }

    const auto [lower, upper] = regime_boundaries(gamma, m);
    if (p >= upper) {
        out.regime = RegimeCase::FiniteEnergy;
        out.gradient_exponent = 2.0;
        out.gradient_space = GradientSpace::H1;
    } else if (p > lower) {
        out.regime = RegimeCase::DistributionalSobolev;
        out.gradient_exponent = sobolev;
        out.gradient_space = GradientSpace::Sobolev;
    } else {
        out.regime = RegimeCase::Entropy;
        out.gradient_exponent = sobolev;
        out.gradient_space = GradientSpace::Marcinkiewicz;
    }
    return out;
}

const char* to_string(RegimeCase c) {
    switch (c) {
    case RegimeCase::DistributionalSobolev: return "distributional";
    case RegimeCase::Entropy: return "entropy";
    case RegimeCase::FiniteEnergy: return "finite_energy";
    }
    return "?";
}

const char* to_string(GradientSpace g) {
    switch (g) {
    case GradientSpace::SobolevStrict: return "W1s_strict";
    case GradientSpace::Sobolev: return "W1s";
    case GradientSpace::Marcinkiewicz: return "M";
    case GradientSpace::H1: return "H1";
    }
    return "?";
}

const char* to_string(LowerOrderKind k) {
    switch (k) {
    case LowerOrderKind::None: return "none";
    case LowerOrderKind::Power: return "power";
    case LowerOrderKind::Singular: return "singular";
    }
    return "?";
}

const char* to_string(DatumFamily f) {
    switch (f) {
    case DatumFamily::Constant: return "constant";
    case DatumFamily::RadialPower: return "radial_power";
    case DatumFamily::Bump: return "bump";
    }
    return "?";
}

BaselineExponents baseline_exponents(double gamma, double m, int dimension) {
    require(gamma >= 0.0 && gamma <= 1.0, "baseline exponents require gamma in [0, 1]");
    require(m >= 1.0, "baseline exponents require m >= 1");
    require(dimension >= 3, "dimension must be >= 3");
    const double n = dimension;
    if (m > 0.5 * n) throw BoundedRegime();
    const double den_r = n - 2.0 * m;
    const double den_q = n - m * (1.0 + gamma);
    require(den_r != 0.0, "baseline exponent r undefined at m = N/2");
    require(den_q != 0.0, "baseline exponent q undefined at m = N/(1 + gamma)");

    BaselineExponents out;
    out.r = n * m * (1.0 - gamma) / den_r;
    out.q = n * m * (1.0 - gamma) / den_q;
    out.m_threshold_low = n / (n + 1.0 - gamma * (n - 1.0));
    out.m_threshold_mid = 2.0 * n / (n * (1.0 - gamma) + 2.0 * (gamma + 1.0));
    return out;
}

}  // namespace degenlab
