#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gbmstop/sensitivity.hpp"
#include "oracles.hpp"

using namespace gbmstop;

namespace {

ProfitFunction one_sided_profit() { return gross_profit(1, 10, 1, 2, 4); }

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

TEST(RootDerivatives, HandValues) {
    const RootDerivatives d = root_derivatives(GbmParams(0.1, 0.1, 0.1));
    EXPECT_NEAR(d.d_d1_d_alpha, -40.0 / 3.0, 1e-12);
    EXPECT_NEAR(d.d_d2_d_alpha, -20.0 / 3.0, 1e-12);
    EXPECT_NEAR(d.d_d1_d_sigma2, 20.0, 1e-12);
    EXPECT_NEAR(d.d_d2_d_sigma2, 0.0, 1e-12);
}

TEST(RootDerivatives, MatchCentralDifferences) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.02, 2.0);
    int n = 0;
    while (n < 300) {
        const double s2 = s(gen), a = u(gen), r = 0.3 * u(gen);
        if (discriminant(r, a, s2) < 1e-3) continue;
        const GbmParams p(r, a, s2);
        const RootDerivatives d = root_derivatives(p);
        const double h = 1e-6;
        const Roots pa = GbmParams(r, a + h, s2).roots(), ma = GbmParams(r, a - h, s2).roots();
        const Roots ps = GbmParams(r, a, s2 + h).roots(), ms = GbmParams(r, a, s2 - h).roots();
        auto close = [](double x, double y) { return std::fabs(x - y) <= 1e-5 * std::max(1.0, std::fabs(y)); };
        ASSERT_TRUE(close(d.d_d1_d_alpha, (pa.d1 - ma.d1) / (2 * h))) << r << " " << a << " " << s2;
        ASSERT_TRUE(close(d.d_d2_d_alpha, (pa.d2 - ma.d2) / (2 * h)));
        ASSERT_TRUE(close(d.d_d1_d_sigma2, (ps.d1 - ms.d1) / (2 * h)));
        ASSERT_TRUE(close(d.d_d2_d_sigma2, (ps.d2 - ms.d2) / (2 * h)));
        ++n;
    }
}

TEST(PredictedSigns, TabulatedCells) {
    const PredictedSigns pos = predicted_signs(GbmParams(0.1, 0.1, 0.1));
    EXPECT_EQ(pos.table, (SignCell{-1, -1, 1, 0}));
    EXPECT_FALSE(pos.table_defect);

    const PredictedSigns neg_small = predicted_signs(GbmParams(-0.01, 0.0, 0.1));  // r < alpha < s2/2
    EXPECT_EQ(neg_small.table, (SignCell{1, -1, -1, 1}));

    const PredictedSigns neg_large = predicted_signs(GbmParams(-0.1, 0.3, 0.1));
    EXPECT_EQ(neg_large.table, (SignCell{-1, 1, 1, -1}));

    const PredictedSigns zero = predicted_signs(GbmParams(0.0, 0.01, 0.1));
    EXPECT_EQ(zero.table.d1_alpha, 0);
    EXPECT_EQ(zero.table.d1_sigma2, 0);
}

TEST(PredictedSigns, DefectRegionUsesComputedSigns) {
    // r < 0 and r <= alpha < -s2/2: both roots exceed 1.
    const GbmParams p(-0.3, -0.25, 0.1);
    const PredictedSigns ps = predicted_signs(p);
    ASSERT_TRUE(ps.table_defect);
    const RootDerivatives d = root_derivatives(p);
    EXPECT_EQ(ps.expected.d1_sigma2, sgn(d.d_d1_d_sigma2));
    EXPECT_EQ(ps.expected.d2_sigma2, sgn(d.d_d2_d_sigma2));
    EXPECT_NE(ps.table.d1_sigma2, ps.expected.d1_sigma2);
}

TEST(PredictedSigns, ExpectedCellMatchesComputedDerivatives) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.02, 2.0);
    int n = 0;
    while (n < 500) {
        const double s2 = s(gen), a = u(gen), r = 0.3 * u(gen);
        if (discriminant(r, a, s2) < 1e-3) continue;
        const GbmParams p(r, a, s2);
        const PredictedSigns ps = predicted_signs(p);
        const RootDerivatives d = root_derivatives(p);
        ASSERT_EQ(ps.expected.d1_alpha, sgn(d.d_d1_d_alpha)) << r << " " << a << " " << s2;
        ASSERT_EQ(ps.expected.d2_alpha, sgn(d.d_d2_d_alpha));
        ASSERT_EQ(ps.expected.d1_sigma2, sgn(d.d_d1_d_sigma2));
        ASSERT_EQ(ps.expected.d2_sigma2, sgn(d.d_d2_d_sigma2));
        ++n;
    }
}

TEST(ThresholdGradient, OneSidedExamples) {
    // d gamma/d alpha at (r, alpha, s2) = (0.1, 0.1, 0.1) and d gamma/d sigma2 at s2 = 0.05.
    const ProfitFunction pf = one_sided_profit();
    {
        const GbmParams p(0.1, 0.1, 0.1);
        const StoppingSolution sol = solve(pf, p);
        EXPECT_NEAR(threshold_gradient(pf, p, sol, Param::Alpha), -2.0952708, 1e-6);
        EXPECT_NEAR(threshold_gradient(pf, p, sol, Param::Sigma2), 0.0, 1e-12);
    }
    {
        const GbmParams p(0.1, 0.09, 0.05);
        EXPECT_NEAR(threshold_gradient(pf, p, solve(pf, p), Param::Sigma2), -0.11528345, 1e-7);
    }
    {
        const GbmParams p(0.1, 0.11, 0.05);
        EXPECT_NEAR(threshold_gradient(pf, p, solve(pf, p), Param::Sigma2), 0.08743004, 1e-7);
    }
}

TEST(ThresholdGradient, FiniteDifferenceCrossCheck) {
    const ProfitFunction pf = one_sided_profit();
    for (double a : {0.05, 0.09, 0.1, 0.11, 0.2}) {
        for (double s2 : {0.05, 0.1, 0.2}) {
            const GbmParams p(0.1, a, s2);
            const StoppingSolution sol = solve(pf, p);
            for (Param w : {Param::Alpha, Param::Sigma2}) {
                const GradientCheck gc = check_threshold_gradient(pf, p, sol, w);
                EXPECT_TRUE(gc.agrees) << a << " " << s2 << " " << to_string(w) << ": " << gc.formula << " vs "
                                       << gc.finite_difference;
            }
        }
    }
}

TEST(ThresholdGradient, UpperThresholdViaMirror) {
    namespace o = oracle::one_sided;
    const double cut = 1.0 / o::x0;
    const ProfitFunction pf({Segment{0.0, cut, ShiftedReciprocal{-o::e / (o::f * o::f), 1.0 / o::f, o::K - o::e / o::f}},
                             Segment{cut, kInf, Polynomial{{-1.0, 11.0, -10.0}, -2}}});
    const GbmParams p(0.1, 0.0, 0.1);
    const StoppingSolution sol = solve(pf, p);
    ASSERT_EQ(sol.problem_class, ProblemClass::OneSidedUpper);
    EXPECT_LT(threshold_log_moment(pf, p, sol), 0.0);
    for (Param w : {Param::Alpha, Param::Sigma2}) {
        const GradientCheck gc = check_threshold_gradient(pf, p, sol, w);
        EXPECT_TRUE(gc.agrees) << to_string(w) << ": " << gc.formula << " vs " << gc.finite_difference;
    }
}

TEST(ThresholdGradient, LogMomentPositiveForLower) {
    const ProfitFunction pf = one_sided_profit();
    const GbmParams p(0.1, 0.1, 0.1);
    EXPECT_GT(threshold_log_moment(pf, p, solve(pf, p)), 0.0);
}

TEST(ThresholdGradient, TwoSidedIsNotApplicable) {
    const ProfitFunction pf = gross_profit(1, 10, 1, 8, -5);
    const GbmParams p(0.1, 0.1, 0.1);
    EXPECT_THROW(threshold_gradient(pf, p, solve(pf, p), Param::Alpha), NotApplicableError);
    const SensitivityReport rep = sensitivity_report(pf, p, false);
    EXPECT_FALSE(rep.not_applicable.empty());
    EXPECT_FALSE(rep.threshold);
}

TEST(Sweep, ExcludesIllPosedPoints) {
    const ProfitFunction pf = gross_profit(1, 10, 1, 8, -5);
    const GbmParams base(-0.1, 0.3, 0.1);
    const auto rows = sweep(pf, base, Param::Alpha, {-0.15, 0.0, 0.1, 0.2});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_TRUE(rows[0].excluded_reason.empty());
    EXPECT_EQ(rows[1].excluded_reason.rfind("ill-posed", 0), 0u);
    EXPECT_EQ(rows[2].excluded_reason.rfind("ill-posed", 0), 0u);
    EXPECT_EQ(*rows[3].delta, 0.0);
    EXPECT_NEAR(*rows[3].beta, 23.093, 1e-3);
}

TEST(Sweep, DeterministicAcrossRuns) {
    const ProfitFunction pf = one_sided_profit();
    const GbmParams base(0.1, 0.1, 0.1);
    const auto a = sweep(pf, base, Param::Sigma2, {0.01, 0.05, 0.1, 0.15});
    const auto b = sweep(pf, base, Param::Sigma2, {0.01, 0.05, 0.1, 0.15});
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].gamma, *b[i].gamma);
}
