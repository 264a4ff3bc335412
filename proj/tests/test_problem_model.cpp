#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "degenlab/problem_model.hpp"

#include <cmath>
#include <numbers>

using namespace degenlab;
using doctest::Approx;

constexpr double pi = std::numbers::pi;

TEST_CASE("coefficient oracles") {
    CoefficientSpec c;
    c.alpha = 1.0;
    c.gamma = 0.0;
    CHECK(coefficient_eval(c, 0.7, 5.0) == Approx(1.0));
    c.gamma = 1.0;
    CHECK(coefficient_eval(c, 0.5, 3.0) == Approx(0.25));
    c.alpha = 2.0;
    c.beta = 2.0;
    c.gamma = 0.5;
    CHECK(coefficient_eval(c, 0.1, 0.0) == Approx(2.0));
}

TEST_CASE("coefficient stays between the degenerate floor and beta") {
    CoefficientSpec c;
    c.alpha = 0.5;
    c.beta = 3.0;
    c.gamma = 1.5;
    c.form = CoefficientForm::Scaled;
    c.spatial_amplitude = 4.0;
    for (double r : {0.0, 0.3, 1.0, 2.0})
        for (double s : {-40.0, -1.0, 0.0, 0.2, 7.0, 1e3}) {
            const double a = coefficient_eval(c, r, s);
            CHECK(a >= coefficient_floor(c, s) * (1 - 1e-15));
            CHECK(a <= c.beta);
            CHECK(coefficient_eval(c, r, -s) == a);
        }
}

TEST_CASE("coefficient validation") {
    CoefficientSpec c;
    c.alpha = 2.0;
    c.beta = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.beta = 2.0;
    c.gamma = -0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("lower-order oracles") {
    CHECK(lower_order_eval(LowerOrderTerm::power(3.0), -2.0) == Approx(-8.0));
    CHECK(lower_order_eval(LowerOrderTerm::singular(1.0), 0.75) == Approx(3.0));
    CHECK(lower_order_eval(LowerOrderTerm::none(), 42.0) == 0.0);
    CHECK(lower_order_inverse(LowerOrderTerm::singular(1.0), 3.0) == Approx(0.75));
    CHECK(lower_order_inverse(LowerOrderTerm::singular(1.0), 0.0) == 0.0);
    CHECK(lower_order_inverse(LowerOrderTerm::singular(2.0), 1.0) == Approx(1.0));
}

TEST_CASE("power absorption is odd and increasing") {
    for (double p : {0.3, 1.0, 2.5}) {
        const auto g = LowerOrderTerm::power(p);
        CHECK(lower_order_eval(g, 0.0) == 0.0);
        double prev = -INFINITY;
        for (double s = -3.0; s <= 3.0; s += 0.25) {
            const double v = lower_order_eval(g, s);
            CHECK(v > prev);
            CHECK(lower_order_eval(g, -s) == Approx(-v));
            prev = v;
        }
    }
}

TEST_CASE("singular absorption: domain, blow-up, inverse") {
    const auto h = LowerOrderTerm::singular(1.5);
    CHECK_THROWS_AS(lower_order_eval(h, -0.1), std::domain_error);
    CHECK_THROWS_AS(lower_order_eval(h, 1.5), std::domain_error);
    CHECK(lower_order_eval(h, 1.5 - 1e-12) > 1e11);
    for (double y : {0.0, 0.1, 1.0, 17.0, 1e6}) CHECK(lower_order_eval(h, lower_order_inverse(h, y)) == Approx(y));
    CHECK_THROWS(lower_order_inverse(LowerOrderTerm::power(2.0), 1.0));
}

TEST_CASE("lower-order derivative agrees with finite differences") {
    for (auto g : {LowerOrderTerm::power(0.5), LowerOrderTerm::power(3.0), LowerOrderTerm::singular(1.0)}) {
        for (double s : {0.1, 0.4, 0.8}) {
            const double h = 1e-6;
            const double fd = (lower_order_eval(g, s + h) - lower_order_eval(g, s - h)) / (2 * h);
            CHECK(lower_order_derivative(g, s) == Approx(fd).epsilon(1e-6));
        }
    }
    // regularized near zero for p < 1
    CHECK(std::isfinite(lower_order_derivative(LowerOrderTerm::power(0.5), 0.0, 1e-10)));
}

TEST_CASE("datum oracles") {
    DatumSpec d;
    CHECK(datum_eval(d, 0.3) == 1.0);
    d.family = DatumFamily::RadialPower;
    d.delta = 1.0;
    CHECK(datum_eval(d, 0.5) == Approx(2.0));
    d.amplitude = 2.0;
    d.delta = 0.5;
    CHECK(datum_eval(d, 0.25) == Approx(4.0));
    CHECK_THROWS_AS(datum_eval(d, 0.0), SingularOrigin);

    DatumSpec bump;
    bump.family = DatumFamily::Bump;
    bump.center = 0.5;
    bump.width = 0.2;
    CHECK(datum_eval(bump, 0.5) == Approx(1.0));
    CHECK(datum_eval(bump, 0.71) == 0.0);
}

TEST_CASE("datum norm oracles") {
    DatumSpec d;
    CHECK(datum_norm_exact(d, 1.0, 3, 1.0) == Approx(4 * pi / 3));
    d.family = DatumFamily::RadialPower;
    d.delta = 3.0;
    CHECK(std::isinf(datum_norm_exact(d, 1.0, 3, 1.0)));
    d.delta = 1.0;
    CHECK(datum_norm_exact(d, 2.0, 3, 1.0) == Approx(4 * pi));

    // bump: (1 - x^2)^2 on [0, 1] centered at 0 with N = 3
    DatumSpec bump;
    bump.family = DatumFamily::Bump;
    bump.center = 0.0;
    bump.width = 1.0;
    // 4 pi \int_0^1 (1 - r^2)^2 r^2 dr = 4 pi (1/3 - 2/5 + 1/7)
    CHECK(datum_norm_exact(bump, 1.0, 3, 1.0) == Approx(4 * pi * (1.0 / 3 - 2.0 / 5 + 1.0 / 7)).epsilon(1e-9));
}

TEST_CASE("unit sphere measure") {
    CHECK(unit_sphere_measure(3) == Approx(4 * pi));
    CHECK(unit_sphere_measure(4) == Approx(2 * pi * pi));
    CHECK(unit_sphere_measure(5) == Approx(8 * pi * pi / 3));
}

TEST_CASE("problem validation") {
    ProblemSpec s;
    CHECK_NOTHROW(s.validate());
    s.dimension = 2;
    CHECK_THROWS_WITH_AS(s.validate(), "dimension must be >= 3", std::invalid_argument);
    s.dimension = 3;
    s.datum.family = DatumFamily::RadialPower;
    s.datum.delta = 2.0;
    s.datum.m = 1.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.datum.m = 1.0;
    CHECK_NOTHROW(s.validate());
    s.lower = LowerOrderTerm::singular(1.0);
    s.datum.amplitude = -1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("regime classification oracles") {
    const auto a = classify_regime(0.5, 2.0, 1.0);
    CHECK(a.regime == RegimeCase::DistributionalSobolev);
    CHECK(a.gradient_exponent == Approx(8.0 / 7.0));

    const auto b = classify_regime(1.0, 4.0, 1.5);
    CHECK(b.regime == RegimeCase::FiniteEnergy);
    CHECK(b.lebesgue_exponent == Approx(6.0));
    CHECK(b.gradient_space == GradientSpace::H1);

    CHECK(classify_regime(1.0, 1.0, 1.5).regime == RegimeCase::Entropy);
}

TEST_CASE("regime boundaries are assigned as in the theorems") {
    // m = 1: p = gamma + 1 is still entropy
    CHECK(classify_regime(1.0, 2.0, 1.0).regime == RegimeCase::Entropy);
    CHECK(classify_regime(1.0, 2.0 + 1e-9, 1.0).regime == RegimeCase::DistributionalSobolev);
    // m = 1.5, gamma = 1: boundaries 2 and 4
    const auto [lo, hi] = regime_boundaries(1.0, 1.5);
    CHECK(lo == Approx(2.0));
    CHECK(hi == Approx(4.0));
    CHECK(classify_regime(1.0, 2.0, 1.5).regime == RegimeCase::Entropy);
    CHECK(classify_regime(1.0, 3.0, 1.5).regime == RegimeCase::DistributionalSobolev);
    CHECK(classify_regime(1.0, 3.0, 1.5).gradient_space == GradientSpace::Sobolev);
    CHECK(classify_regime(1.0, 4.0, 1.5).regime == RegimeCase::FiniteEnergy);
    CHECK(std::isnan(regime_boundaries(1.0, 1.0).upper));
}

TEST_CASE("gradient exponent below 2 outside the finite energy case") {
    for (double gamma : {0.0, 0.5, 1.0})
        for (double m : {1.0, 1.25, 1.5, 2.0})
            for (double p : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}) {
                const auto pr = classify_regime(gamma, p, m);
                if (pr.regime != RegimeCase::FiniteEnergy) CHECK(pr.gradient_exponent < 2.0 + 1e-12);
                CHECK(pr.lebesgue_exponent == Approx(p * m));
            }
}

TEST_CASE("classification rejects bad input") {
    CHECK_THROWS(classify_regime(-1.0, 1.0, 1.0));
    CHECK_THROWS(classify_regime(1.0, 0.0, 1.0));
    CHECK_THROWS(classify_regime(1.0, 1.0, 0.5));
}

TEST_CASE("baseline exponent oracles") {
    auto e = baseline_exponents(0.5, 1.0, 3);
    CHECK(e.r == Approx(1.5));
    CHECK(e.q == Approx(1.0));
    e = baseline_exponents(1.0, 1.0, 3);
    CHECK(e.r == Approx(0.0));
    CHECK(e.q == Approx(0.0));
    e = baseline_exponents(0.5, 2.0, 5);
    CHECK(e.r == Approx(5.0));
    CHECK(e.q == Approx(2.5));
    CHECK_THROWS_AS(baseline_exponents(0.5, 2.0, 3), BoundedRegime);
}

TEST_CASE("string names") {
    CHECK(std::string(to_string(RegimeCase::FiniteEnergy)) == "finite_energy");
    CHECK(std::string(to_string(GradientSpace::Marcinkiewicz)) == "M");
    CHECK(std::string(to_string(LowerOrderKind::Singular)) == "singular");
    CHECK(std::string(to_string(DatumFamily::RadialPower)) == "radial_power");
}
