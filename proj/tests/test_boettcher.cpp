#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace cubicpcf;
using testutil::Gen;

namespace {

const BivarPoly A = BivarPoly::a(), B = BivarPoly::b();

LaurentSeries inv_t(const Rational& c = 1, std::int64_t k = 1) { return LaurentSeries::monomial(c, -k); }

ParamCurve rational_curve(UniPoly an, UniPoly ad, UniPoly bn, UniPoly bd) {
    ParamCurve c;
    c.a = {std::move(an), std::move(ad)};
    c.b = {std::move(bn), std::move(bd)};
    c.validate();
    return c;
}

// Phi(z) = z prod_k (1 + w_k)^{1/3^{k+1}} with f(z_k) = z_k^3 (1 + w_k),
// accumulated in logarithms along the orbit.
Complex phi_product_oracle(NumericParam p, Complex z, int terms = 40) {
    Complex log_phi = std::log(z), zk = z;
    double scale = 1.0 / 3.0;
    for (int k = 0; k < terms && std::abs(zk) < 1e100; ++k) {
        const Complex w = -3.0 * p.a * p.a / (zk * zk) + p.b / (zk * zk * zk);
        log_phi += scale * std::log(1.0 + w);
        zk = eval_f(p, zk);
        scale /= 3.0;
    }
    return std::exp(log_phi);
}

}  // namespace

TEST(BoettcherCoeffs, LowOrderValues) {
    const BoettcherExpansion e = boettcher_coeffs(3);
    ASSERT_EQ(e.alpha.size(), 3u);
    EXPECT_EQ(e.alpha[0], -A.pow(2));
    EXPECT_EQ(e.alpha[1], Rational(1, 3) * B);
    EXPECT_EQ(e.alpha[2], -A.pow(4));
    EXPECT_THROW(boettcher_coeffs(0), UsageError);
    EXPECT_THROW(boettcher_coeffs(kMaxBoettcherOrder + 1), BudgetExceeded);
}

TEST(BoettcherCoeffs, PrefixStableAcrossOrders) {
    const BoettcherExpansion e12 = boettcher_coeffs(12), e24 = boettcher_coeffs(24);
    for (int i = 0; i < 12; ++i) EXPECT_EQ(e12.alpha[i], e24.alpha[i]) << i + 1;
}

TEST(BoettcherCoeffs, FunctionalEquationHoldsToTheTruncationOrder) {
    for (int N : {1, 2, 5, 12, 24}) EXPECT_FALSE(functional_equation_residual(boettcher_coeffs(N)).has_value()) << N;
    // perturbing one coefficient breaks the equation at the matching order
    BoettcherExpansion e = boettcher_coeffs(8);
    e.alpha[4] = e.alpha[4] + BivarPoly(Rational(1));
    const auto r = functional_equation_residual(e);
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(*r, 6);
}

TEST(BoettcherCoeffs, MatchesAnIndependentOrderByOrderSolve) {
    // frozen from a separate symbolic solve of V U(w^3 / V) = U(w)^3
    const BoettcherExpansion e = boettcher_coeffs(8);
    EXPECT_EQ(e.alpha[3], Rational(2, 3) * A.pow(2) * B);
    EXPECT_EQ(e.alpha[4], Rational(-5, 3) * A.pow(6) - Rational(1, 3) * A.pow(2) - Rational(1, 9) * B.pow(2));
    EXPECT_EQ(e.alpha[5], Rational(5, 3) * A.pow(4) * B);
    EXPECT_EQ(e.alpha[6], Rational(-10, 3) * A.pow(8) - Rational(5, 3) * A.pow(4) - Rational(5, 9) * A.pow(2) * B.pow(2));
    EXPECT_EQ(e.alpha[7], Rational(40, 9) * A.pow(6) * B + Rational(5, 9) * A.pow(2) * B + Rational(5, 81) * B.pow(3) +
                              Rational(1, 9) * B);
}

TEST(BoettcherCoeffs, TextRoundTrip) {
    const BoettcherExpansion e = boettcher_coeffs(10);
    std::stringstream ss;
    e.write(ss);
    const BoettcherExpansion back = BoettcherExpansion::read(ss);
    EXPECT_EQ(back.order, 10);
    EXPECT_EQ(back.alpha, e.alpha);
}

TEST(PhiPower, PolynomialParts) {
    const PhiPower p1 = phi_power(1, 8);
    EXPECT_EQ(p1.poly_part, (std::vector<BivarPoly>{BivarPoly{}, Rational(1)}));
    const PhiPower p2 = phi_power(2, 8);
    EXPECT_EQ(p2.poly_part, (std::vector<BivarPoly>{Rational(-2) * A.pow(2), BivarPoly{}, Rational(1)}));
    const PhiPower p3 = phi_power(3, 8);
    EXPECT_EQ(p3.poly_part, (std::vector<BivarPoly>{B, Rational(-3) * A.pow(2), BivarPoly{}, Rational(1)}));
    EXPECT_THROW(phi_power(0, 8), UsageError);
}

TEST(PhiPower, SixthPowerIsTheSquareOfTheMap) {
    // Phi^6 = (Phi o f)^2 = f^2 + 2 alpha_1 + O(1/z)
    const PhiPower p6 = phi_power(6, 12);
    const std::vector<BivarPoly> want{B.pow(2) - Rational(2) * A.pow(2), Rational(-6) * A.pow(2) * B,
                                      Rational(9) * A.pow(4),          Rational(2) * B,
                                      Rational(-6) * A.pow(2),         BivarPoly{},
                                      Rational(1)};
    EXPECT_EQ(p6.poly_part, want);
}

TEST(PhiPower, TailMatchesNumericPower) {
    Gen g(501);
    for (int k = 1; k <= 4; ++k) {
        const PhiPower pk = phi_power(k, 16);
        const NumericParam p{g.complex(1), g.complex(1)};
        const Complex z = 8.0 * escape_bound(p) * std::polar(1.0, g.real(0, 6.28));
        Complex poly = 0, zp = 1, tail = 0, wp = 1;
        for (const auto& c : pk.poly_part) {
            poly += c.eval(p.a, p.b) * zp;
            zp *= z;
        }
        for (const auto& c : pk.tail) {
            wp /= z;
            tail += c.eval(p.a, p.b) * wp;
        }
        const Complex want = std::pow(phi_eval(p, z, 16).value, double(k));
        EXPECT_LT(std::abs(poly + tail - want), 1e-9 * std::pow(std::abs(z), k)) << k;
    }
}

TEST(PhiEval, Examples) {
    EXPECT_EQ(phi_eval(NumericParam{0, 0}, 10.0, 12).value, Complex(10.0));
    const GreenValue g10 = green_arch(NumericParam{1, 0}, 100.0, 1e-12);
    EXPECT_NEAR(std::log(std::abs(phi_eval(NumericParam{1, 0}, 100.0, 12).value)), g10.value, 1e-8);
    const PhiValue v11 = phi_eval(NumericParam{1, 1}, 50.0, 12);
    const GreenValue g11 = green_arch(NumericParam{1, 1}, 50.0, 1e-12);
    EXPECT_NEAR(std::log(std::abs(v11.value)), g11.value, g11.error + v11.truncation_estimate / 50.0 + 1e-12);
    EXPECT_THROW(phi_eval(NumericParam{1, 1}, 5.0, 12), DomainError);
}

TEST(PhiEval, MatchesTheProductOracle) {
    Gen g(502);
    for (int k = 0; k < 100; ++k) {
        const NumericParam p{g.complex(2), g.complex(4)};
        const Complex z = escape_bound(p) * g.real(4, 10) * std::polar(1.0, g.real(0, 6.28));
        const PhiValue v = phi_eval(p, z, 24);
        EXPECT_LT(std::abs(v.value - phi_product_oracle(p, z)), v.truncation_estimate + 1e-12 * std::abs(z)) << k;
    }
}

TEST(PhiEval, LogModulusIsTheGreenFunction) {
    Gen g(503);
    for (int k = 0; k < 60; ++k) {
        const NumericParam p{g.complex(2), g.complex(4)};
        const Complex z = escape_bound(p) * g.real(4, 8) * std::polar(1.0, g.real(0, 6.28));
        const PhiValue v = phi_eval(p, z, 24);
        const GreenValue gv = green_arch(p, z, 1e-12);
        // |log|x| - log|y|| <= |x - y| / min(|x|, |y|), and |Phi| >= |z| / 2 here
        EXPECT_NEAR(std::log(std::abs(v.value)), gv.value, gv.error + 2 * v.truncation_estimate / std::abs(z) + 1e-12);
    }
}

TEST(ZetaLimit, Examples) {
    // b = 0: c_n^- = -c_n^+
    const ParamCurve odd = rational_curve({1}, UniPoly::x(), {0}, {1});
    const ZetaReport z = zeta_limit(odd, Puncture::at(0), 2, 1, 1);
    EXPECT_EQ(z.zeta, -1);
    EXPECT_TRUE(z.root_of_unity);
    EXPECT_EQ(z.candidate_order, 2);
    // a = 0: the two critical points coincide
    const ParamCurve degenerate = rational_curve({0}, {1}, {1}, UniPoly::x());
    const ZetaReport one = zeta_limit(degenerate, Puncture::at(0), 3, 1, 1);
    EXPECT_EQ(one.zeta, 1);
    EXPECT_EQ(one.candidate_order, 1);
    EXPECT_EQ(one.abs_deviation, 0.0);
}

TEST(ZetaLimit, TriplesWithTheIterate) {
    const std::vector<ParamCurve> curves{
        rational_curve({1}, UniPoly::x(), {1}, UniPoly::x()),            // a = 1/t, b = 1/t
        rational_curve({1}, UniPoly::x(), {1}, UniPoly::monomial(1, 3)),  // a = 1/t, b = 1/t^3
    };
    for (const auto& c : curves) {
        for (int n = 1; n <= 3; ++n) {
            const Rational zn = zeta_limit(c, Puncture::at(0), n, 1, 1).zeta;
            const Rational zn1 = zeta_limit(c, Puncture::at(0), n + 1, 1, 1).zeta;
            EXPECT_EQ(zn1, zn * zn * zn) << n;
        }
    }
    // c_1^+ = -1/t^3 and c_1^- = 3/t^3, so zeta_1 = -3 is not a root of unity
    const ZetaReport r = zeta_limit(curves[1], Puncture::at(0), 1, 1, 1);
    EXPECT_EQ(r.zeta, -3);
    EXPECT_FALSE(r.root_of_unity);
    EXPECT_EQ(r.candidate_order, 0);
    EXPECT_DOUBLE_EQ(r.abs_deviation, 2.0);
}

TEST(ZetaLimit, PreconditionFailures) {
    const ParamCurve good = rational_curve({1}, UniPoly::x(), {1}, UniPoly::x());
    EXPECT_THROW(zeta_limit(good, Puncture::at(0), 2, 1, 2), NumericalError);
    EXPECT_THROW(zeta_limit(good, Puncture::at(0), 0, 1, 1), UsageError);
    // b = 2a^3 + a: the plus sign is a BadPole
    const ParamCurve fixed = rational_curve({1}, UniPoly::x(), {2, 0, 1}, UniPoly::monomial(1, 3));
    EXPECT_THROW(zeta_limit(fixed, Puncture::at(0), 2, 1, 1), UsageError);
}

TEST(OrderGrowth, Examples) {
    const ParamCurve good = rational_curve({1}, UniPoly::x(), {1}, UniPoly::x());
    const OrderGrowthReport r1 = order_growth_check(good, Puncture::at(0), Sign::Plus, 1, 2, 5);
    EXPECT_TRUE(r1.strictly_increasing);
    ASSERT_EQ(r1.orders.size(), 4u);
    for (const auto& o : r1.orders) ASSERT_TRUE(o.has_value());
    const OrderGrowthReport r3 = order_growth_check(good, Puncture::at(0), Sign::Plus, 3, 2, 2);
    ASSERT_TRUE(r3.orders[0].has_value());
    EXPECT_GE(*r3.orders[0], *r1.orders[1]) << "Phi^3(c_2) = Phi(c_3)";
    const ParamCurve fixed = rational_curve({1}, UniPoly::x(), {2, 0, 1}, UniPoly::monomial(1, 3));
    EXPECT_THROW(order_growth_check(fixed, Puncture::at(0), Sign::Plus, 1, 1, 3), UsageError);
}

TEST(OrderGrowth, VanishesWhenTheMapIsACube) {
    const PhiPower p1 = phi_power(1, 12);
    EXPECT_FALSE(phi_tail_order(p1, LaurentSeries(), LaurentSeries(), inv_t(), 32).has_value());
}
