#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gbmstop/profit.hpp"
#include "oracles.hpp"

using namespace gbmstop;

namespace {

ProfitFunction whole_line(SegmentForm f) { return ProfitFunction({Segment{0.0, kInf, std::move(f)}}); }

}  // namespace

TEST(GrossProfit, JoinPointAndCoefficient) {
    namespace o1 = oracle::one_sided;
    const auto j1 = gross_profit_join(o1::a, o1::b, o1::c, o1::f, o1::K);
    EXPECT_NEAR(j1.x0, o1::x0, 1e-12);
    EXPECT_NEAR(j1.e, o1::e, 1e-10);
    namespace o2 = oracle::two_sided;
    const auto j2 = gross_profit_join(o2::a, o2::b, o2::c, o2::f, o2::K);
    EXPECT_NEAR(j2.x0, o2::x0, 1e-12);
    EXPECT_NEAR(j2.e, o2::e, 1e-10);
}

TEST(GrossProfit, JoinIsC1) {
    for (double K : {4.0, -5.0}) {
        const double f = K > 0 ? 2.0 : 8.0;
        const ProfitFunction pf = gross_profit(1, 10, 1, f, K);
        const double x0 = gross_profit_join(1, 10, 1, f, K).x0;
        const double h = 1e-7;
        EXPECT_NEAR(pf.eval(x0 - h), pf.eval(x0 + h), 1e-5);
        EXPECT_NEAR(pf.derivative(x0 - h), pf.derivative(x0 + h), 1e-5);
        EXPECT_NEAR(pf.eval(x0 - 1e-3), -(x0 - 1e-3 - 1) * (x0 - 1e-3 - 10), 1e-12);
    }
}

TEST(GrossProfit, RejectsImpossibleJoins) {
    EXPECT_THROW(gross_profit(10, 1, 1, 2, 4), BadParametersError);
    EXPECT_THROW(gross_profit(1, 10, 0, 2, 4), BadParametersError);
}

TEST(SignStructure, OneAndTwoSidedExamples) {
    const SignStructure s1 = classify_signs(gross_profit(1, 10, 1, 2, 4));
    EXPECT_EQ(s1.kind, SignKind::Regular);
    EXPECT_NEAR(s1.x1l, 1.0, 1e-12);
    EXPECT_NEAR(s1.x1r, 1.0, 1e-12);
    EXPECT_TRUE(std::isinf(s1.x2l));
    EXPECT_TRUE(std::isinf(s1.x2r));

    const SignStructure s2 = classify_signs(gross_profit(1, 10, 1, 8, -5));
    EXPECT_NEAR(s2.x1l, 1.0, 1e-12);
    EXPECT_NEAR(s2.x2l, oracle::two_sided::x2r, 1e-10);
    EXPECT_NEAR(s2.x2r, oracle::two_sided::x2r, 1e-10);
}

TEST(SignStructure, ZeroPlateau) {
    // Pi = x - 1 below 1, 0 on [1, 2], x - 2 above: negative, zero run, positive.
    const ProfitFunction pf({Segment{0.0, 1.0, Polynomial{{-1.0, 1.0}}}, Segment{1.0, 2.0, Constant{0.0}},
                             Segment{2.0, kInf, Polynomial{{-2.0, 1.0}}}});
    const SignStructure s = classify_signs(pf);
    EXPECT_EQ(s.kind, SignKind::Regular);
    EXPECT_DOUBLE_EQ(s.x1l, 1.0);
    EXPECT_DOUBLE_EQ(s.x1r, 2.0);
    EXPECT_TRUE(std::isinf(s.x2r));
}

TEST(SignStructure, TrivialSigns) {
    EXPECT_EQ(classify_signs(ProfitFunction::constant(-1.0)).kind, SignKind::AllNonpositive);
    EXPECT_EQ(classify_signs(ProfitFunction::constant(2.0)).kind, SignKind::AllNonnegative);
    EXPECT_EQ(classify_signs(ProfitFunction::constant(0.0)).kind, SignKind::AllNonpositive);
    EXPECT_EQ(classify_signs(whole_line(Polynomial{{0.0, 0.0, 1.0}})).kind, SignKind::AllNonnegative);
}

TEST(SignStructure, UnsupportedPatterns) {
    // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6: three sign changes.
    EXPECT_THROW(classify_signs(whole_line(Polynomial{{-6.0, 11.0, -6.0, 1.0}})), UnsupportedShapeError);
    // (x-1)(x-2): positive, negative, positive.
    EXPECT_THROW(classify_signs(whole_line(Polynomial{{2.0, -3.0, 1.0}})), UnsupportedShapeError);
}

TEST(Segments, MustPartitionTheHalfLine) {
    EXPECT_THROW(ProfitFunction({}), BadParametersError);
    EXPECT_THROW(ProfitFunction({Segment{1.0, kInf, Constant{1.0}}}), BadParametersError);
    EXPECT_THROW(ProfitFunction({Segment{0.0, 5.0, Constant{1.0}}}), BadParametersError);
    EXPECT_THROW(ProfitFunction({Segment{0.0, 1.0, Constant{1.0}}, Segment{2.0, kInf, Constant{1.0}}}),
                 BadParametersError);
    // Pole of e/(x - f) inside its segment.
    EXPECT_THROW(ProfitFunction({Segment{0.0, kInf, ShiftedReciprocal{1.0, 3.0, 0.0}}}), BadParametersError);
}

TEST(Evaluation, FormsAndLaurent) {
    const ProfitFunction laurent = whole_line(Polynomial{{-1.0, 11.0, -10.0}, -2});  // -x^-2 + 11 x^-1 - 10
    for (double x : {0.3, 1.0, 2.5}) EXPECT_NEAR(laurent.eval(x), -1.0 / (x * x) + 11.0 / x - 10.0, 1e-12);
    const ProfitFunction pw = whole_line(Power{72.0, -2.0});
    EXPECT_DOUBLE_EQ(pw.eval(3.0), 8.0);
    const ProfitFunction rc({Segment{0.0, 1.0, Constant{0.0}}, Segment{1.0, kInf, ShiftedReciprocal{2.0, 0.5, 1.0}}});
    EXPECT_DOUBLE_EQ(rc.eval(1.5), 3.0);
    EXPECT_DOUBLE_EQ(rc.eval(0.5), 0.0);
}

TEST(Evaluation, DerivativeMatchesCentralDifference) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(std::log(0.05), std::log(60.0));
    const ProfitFunction pf = gross_profit(1, 10, 1, 2, 4);
    const double x0 = oracle::one_sided::x0;
    for (int i = 0; i < 200; ++i) {
        const double x = std::exp(u(gen));
        const double h = 1e-6 * x;
        if (std::fabs(x - x0) < 2 * h) continue;
        const double fd = (pf.eval(x + h) - pf.eval(x - h)) / (2 * h);
        ASSERT_NEAR(pf.derivative(x), fd, 1e-6 * std::max(1.0, std::fabs(fd))) << x;
    }
}

TEST(Evaluation, NegationFlipsEveryValue) {
    const ProfitFunction pf = gross_profit(1, 10, 1, 8, -5);
    const ProfitFunction neg = pf.negated();
    for (double x : {0.1, 1.0, 5.0, 9.4, 12.0, 1e3}) EXPECT_DOUBLE_EQ(neg.eval(x), -pf.eval(x));
}

TEST(Tails, GrossProfitEnds) {
    const ProfitFunction pf = gross_profit(1, 10, 1, 2, 4);
    EXPECT_DOUBLE_EQ(pf.tail_at_zero().coeff, -10.0);  // -c a b
    EXPECT_DOUBLE_EQ(pf.tail_at_zero().exponent, 0.0);
    EXPECT_DOUBLE_EQ(pf.tail_at_infinity().coeff, 4.0);
    EXPECT_DOUBLE_EQ(pf.tail_at_infinity().exponent, 0.0);
}

TEST(Tails, RestBoundHolds) {
    // |Pi - coeff x^p| <= rest_bound x^rest_exponent past rest_from.
    const ProfitFunction pf = gross_profit(1, 10, 1, 8, -5);
    const Tail& t = pf.tail_at_infinity();
    for (double x = std::max(t.rest_from, 12.0); x < 1e8; x *= 3.0) {
        const double rest = pf.eval(x) - t.coeff * std::pow(x, t.exponent);
        ASSERT_LE(std::fabs(rest), t.rest_bound * std::pow(x, t.rest_exponent) * (1 + 1e-12)) << x;
        ASSERT_NEAR(pf.rest_at_infinity(x), rest, 1e-12 * std::max(1.0, std::fabs(rest)));
    }
}

TEST(Integrability, ParticularSolutionCriteria) {
    const Roots rt{-2.0, 1.0};
    EXPECT_TRUE(check_vp_plus_finite(gross_profit(1, 10, 1, 2, 4), rt));
    EXPECT_TRUE(check_vp_minus_finite(gross_profit(1, 10, 1, 2, 4), rt));
    // Positive x^2 tail grows faster than x^d2.
    EXPECT_FALSE(check_vp_plus_finite(whole_line(Power{1.0, 2.0}), rt));
    EXPECT_TRUE(check_vp_minus_finite(whole_line(Power{1.0, 2.0}), rt));
    // Negative x^-3 at zero is below x^d1.
    EXPECT_FALSE(check_vp_minus_finite(whole_line(Power{-1.0, -3.0}), rt));
}

TEST(PolynomialRoots, InsideOpenInterval) {
    const auto r = polynomial_roots_in({-6.0, 11.0, -6.0, 1.0}, 0.0, kInf);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], 1.0, 1e-12);
    EXPECT_NEAR(r[1], 2.0, 1e-12);
    EXPECT_NEAR(r[2], 3.0, 1e-12);
    EXPECT_EQ(polynomial_roots_in({-6.0, 11.0, -6.0, 1.0}, 1.5, 2.5).size(), 1u);
    EXPECT_TRUE(polynomial_roots_in({1.0, 0.0, 1.0}, 0.0, kInf).empty());
}

TEST(SupAbs, CoversBreakpoints) {
    const ProfitFunction pf = gross_profit(1, 10, 1, 2, 4);
    EXPECT_NEAR(pf.sup_abs(1.0, 10.0), 20.25, 1e-3);  // max of -(x-1)(x-10) at 5.5
}
