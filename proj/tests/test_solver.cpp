#include <cmath>

#include <gtest/gtest.h>

#include "gbmstop/solver.hpp"
#include "oracles.hpp"

using namespace gbmstop;

namespace {

const GbmParams kBase(oracle::kR, oracle::kAlpha, oracle::kSigma2);

ProfitFunction one_sided_profit() { return gross_profit(1, 10, 1, 2, 4); }
ProfitFunction two_sided_profit() { return gross_profit(1, 10, 1, 8, -5); }

// Pi(1/s) for the one-sided gross profit.
ProfitFunction mirrored_one_sided() {
    namespace o = oracle::one_sided;
    const double cut = 1.0 / o::x0;
    return ProfitFunction({Segment{0.0, cut, ShiftedReciprocal{-o::e / (o::f * o::f), 1.0 / o::f, o::K - o::e / o::f}},
                           Segment{cut, kInf, Polynomial{{-1.0, 11.0, -10.0}, -2}}});
}

}  // namespace

TEST(OneSided, ThresholdAndCoefficients) {
    const StoppingSolution sol = solve(one_sided_profit(), kBase);
    ASSERT_EQ(sol.problem_class, ProblemClass::OneSidedLower);
    EXPECT_NEAR(*sol.gamma, oracle::one_sided::gamma, 1e-11);
    EXPECT_NEAR(*sol.a2, 0.0, 1e-12);
    EXPECT_GT(*sol.a1, 0.0);
    EXPECT_TRUE(sol.stopping_region.contains(*sol.gamma));
    EXPECT_FALSE(sol.continuation_region.contains(*sol.gamma));
    EXPECT_TRUE(sol.continuation_region.contains(1e6));
}

TEST(OneSided, ValueMatchesClosedForm) {
    const StoppingSolution sol = solve(one_sided_profit(), kBase);
    for (double x : {0.4, 1.0, 3.0, 6.9, 7.0, 10.0, 50.0}) {
        const double v = oracle::one_sided::value(x);
        ASSERT_NEAR(sol.value(x), v, 1e-9 * std::fabs(v)) << x;
    }
    EXPECT_EQ(sol.value(0.2), 0.0);
    EXPECT_EQ(sol.value(*sol.gamma), 0.0);
}

TEST(OneSided, DerivativeMatchesDifferenceOfValue) {
    const StoppingSolution sol = solve(one_sided_profit(), kBase);
    for (double x : {0.5, 2.0, 8.0, 40.0}) {
        const double h = 1e-5 * x;
        const double fd = (sol.value(x + h) - sol.value(x - h)) / (2 * h);
        ASSERT_NEAR(sol.derivative(x), fd, 1e-6 * std::max(1.0, std::fabs(fd))) << x;
    }
    EXPECT_NEAR(sol.derivative(*sol.gamma * (1 + 1e-12)), 0.0, 1e-8);
}

TEST(TwoSided, ThresholdsAndValues) {
    const StoppingSolution sol = solve(two_sided_profit(), kBase);
    ASSERT_EQ(sol.problem_class, ProblemClass::TwoSided);
    EXPECT_NEAR(*sol.delta, oracle::two_sided::delta, 1e-11);
    EXPECT_NEAR(*sol.beta, oracle::two_sided::beta, 1e-9);
    EXPECT_NEAR(sol.value(1.0), oracle::two_sided::value_at_1, 1e-10);
    EXPECT_NEAR(sol.value(10.0), oracle::two_sided::value_at_10, 1e-10);
    for (double x : {0.4, 2.0, 9.0, 9.4, 15.0, 22.9}) {
        const double v = oracle::two_sided::value(x);
        ASSERT_NEAR(sol.value(x), v, 1e-9 * std::fabs(v)) << x;
    }
    EXPECT_EQ(sol.value(30.0), 0.0);
    EXPECT_TRUE(sol.stopping_region.contains(*sol.beta));
}

TEST(TwoSided, AnchorsAgreeAtTheSwitch) {
    const StoppingSolution sol = solve(two_sided_profit(), kBase);
    ASSERT_TRUE(sol.switch_point());
    const double s = *sol.switch_point();
    EXPECT_GT(s, *sol.delta);
    EXPECT_LT(s, *sol.beta);
    EXPECT_NEAR(sol.value(s * (1 - 1e-13)), sol.value(s * (1 + 1e-13)), 1e-9);
    EXPECT_EQ(*sol.anchor_for(s / 2), *sol.delta);
    EXPECT_EQ(*sol.anchor_for(s * 2), *sol.beta);
}

TEST(TwoSided, DirectSolveAgrees) {
    const TwoSidedThresholds t = solve_two_sided(two_sided_profit(), kBase);
    EXPECT_NEAR(t.delta, oracle::two_sided::delta, 1e-11);
    EXPECT_NEAR(t.beta, oracle::two_sided::beta, 1e-9);
}

TEST(TwoSided, DegenerateLowerSideForNegativeRate) {
    const GbmParams p(-0.1, 0.2, 0.1);
    const StoppingSolution sol = solve(two_sided_profit(), p);
    ASSERT_EQ(sol.problem_class, ProblemClass::TwoSided);
    EXPECT_EQ(*sol.delta, 0.0);
    EXPECT_TRUE(std::isfinite(*sol.beta));
    EXPECT_FALSE(sol.stopping_region.contains(1e-9));
    EXPECT_TRUE(sol.stopping_region.contains(*sol.beta * 2));
}

TEST(Mirror, UpperThresholdIsReciprocalOfLower) {
    // 1/X is a GBM with drift s2 - alpha; its profit Pi(1/y) gives the mirrored problem.
    const GbmParams mp(oracle::kR, oracle::kSigma2 - oracle::kAlpha, oracle::kSigma2);
    EXPECT_NEAR(mp.roots().d1, -1.0, 1e-12);
    EXPECT_NEAR(mp.roots().d2, 2.0, 1e-12);
    const StoppingSolution sol = solve(mirrored_one_sided(), mp);
    ASSERT_EQ(sol.problem_class, ProblemClass::OneSidedUpper);
    EXPECT_NEAR(*sol.zeta, 1.0 / oracle::one_sided::gamma, 1e-9);
    for (double x : {0.5, 2.0, 10.0}) {
        const double v = oracle::one_sided::value(x);
        ASSERT_NEAR(sol.value(1.0 / x), v, 1e-8 * v) << x;
    }
    EXPECT_NEAR(*sol.a1, 0.0, 1e-12);
}

TEST(Classes, TrivialProblems) {
    const StoppingSolution stop = solve(ProfitFunction::constant(-1.0), kBase);
    EXPECT_EQ(stop.problem_class, ProblemClass::TrivialStopNow);
    EXPECT_EQ(stop.value(3.0), 0.0);

    const StoppingSolution never = solve(ProfitFunction::constant(2.0), kBase);
    EXPECT_EQ(never.problem_class, ProblemClass::TrivialNeverStop);
    EXPECT_NEAR(never.value(3.0), 2.0 / oracle::kR, 1e-10);

    // x^2 grows faster than x^d2 = x: never stopping is worth infinity.
    const StoppingSolution inf = solve(ProfitFunction({Segment{0.0, kInf, Power{1.0, 2.0}}}), kBase);
    EXPECT_EQ(inf.problem_class, ProblemClass::TrivialNeverStop);
    EXPECT_TRUE(std::isinf(inf.value(1.0)));
}

TEST(Classes, NegativeRateCounterexampleIsDegenerate) {
    // Pi < 0 only below 1, but the discounted negative part never outweighs the future.
    const ProfitFunction pf({Segment{0.0, 3.0, Polynomial{{-1.0, 0.0, 1.0}}}, Segment{3.0, kInf, Power{72.0, -2.0}}});
    const GbmParams p(-0.1, 0.3, 0.1);
    const StoppingSolution sol = solve(pf, p);
    ASSERT_EQ(sol.problem_class, ProblemClass::NeverStopDegenerate);
    const ParticularSolution vp = particular_solution(pf, p);
    for (double x : {0.1, 0.5, 2.0, 10.0}) EXPECT_NEAR(sol.value(x), vp(x), 1e-10 * std::fabs(vp(x)));
    EXPECT_TRUE(sol.stopping_region.empty());
}

TEST(Classes, ClassifyAgreesWithSolve) {
    EXPECT_EQ(classify(one_sided_profit(), kBase), ProblemClass::OneSidedLower);
    EXPECT_EQ(classify(two_sided_profit(), kBase), ProblemClass::TwoSided);
}

TEST(Classes, UnsupportedShapePropagates) {
    const ProfitFunction pf({Segment{0.0, kInf, Polynomial{{-6.0, 11.0, -6.0, 1.0}}}});
    EXPECT_THROW(solve(pf, kBase), UnsupportedShapeError);
}

TEST(Nondegeneracy, GrossProfitSides) {
    const NondegeneracyReport r1 = nondegeneracy_check(one_sided_profit(), kBase.roots());
    EXPECT_EQ(r1.lower, SideStatus::Nondegenerate);
    EXPECT_EQ(r1.upper, SideStatus::NotApplicable);
    const NondegeneracyReport r2 = nondegeneracy_check(two_sided_profit(), kBase.roots());
    EXPECT_EQ(r2.lower, SideStatus::Nondegenerate);
    EXPECT_EQ(r2.upper, SideStatus::Nondegenerate);
}

TEST(Probe, LowerDefinitionBracketsGamma) {
    const ProbeReport pr = definition_probe_lower(one_sided_profit(), kBase, 60);
    ASSERT_TRUE(pr.found);
    EXPECT_FALSE(pr.at_grid_edge);
    // The probe resolves gamma to one step of its geometric grid over six decades.
    const double step = std::pow(1e6, 1.0 / 59.0);
    EXPECT_GE(pr.estimate, oracle::one_sided::gamma / step);
    EXPECT_LE(pr.estimate, oracle::one_sided::gamma * step);
}

TEST(Particular, ConstantProfit) {
    const ParticularSolution vp = particular_solution(ProfitFunction::constant(3.0), kBase);
    EXPECT_NEAR(vp(0.7), 30.0, 1e-10);
    EXPECT_NEAR(vp.derivative(0.7), 0.0, 1e-10);
    EXPECT_THROW(particular_solution(ProfitFunction({Segment{0.0, kInf, Power{1.0, 2.0}}}), kBase),
                 NotIntegrableError);
}

TEST(Ode, GeneralSolutionThroughValueReproducesIt) {
    const StoppingSolution sol = solve(one_sided_profit(), kBase);
    const double xs = 2.0, s2 = oracle::kSigma2;
    const OdeSolution ode =
        ode_general_solution(one_sided_profit(), kBase, {xs, s2 / 2 * sol.value(xs), s2 / 2 * xs * sol.derivative(xs)});
    for (double x : {0.5, 1.0, 5.0, 12.0}) {
        ASSERT_NEAR(ode.value(x), sol.value(x), 1e-8 * std::fabs(sol.value(x))) << x;
        ASSERT_NEAR(ode.derivative(x), sol.derivative(x), 1e-7 * std::max(1.0, std::fabs(sol.derivative(x)))) << x;
    }
}

TEST(Coefficients, VanishAtTheThresholdEquation) {
    const Coefficients c = coefficients(one_sided_profit(), kBase, oracle::one_sided::gamma);
    EXPECT_NEAR(c.a2, 0.0, 1e-12);
    EXPECT_GT(c.a1, 0.0);
}

TEST(Entrance, DualOfNegatedStopping) {
    const EntranceSolution ent = solve_entrance(one_sided_profit(), kBase);
    ASSERT_EQ(ent.kind, EntranceKind::Regular);
    ASSERT_TRUE(ent.negated_problem());
    const StoppingSolution& neg = *ent.negated_problem();
    for (double x : {0.2, 1.0, 4.0, 20.0})
        EXPECT_NEAR(ent.value(x) - ent.vp(x), neg.value(x), 1e-8 * std::max(1.0, std::fabs(neg.value(x)))) << x;
    EXPECT_EQ(ent.entrance_region.to_string(), neg.stopping_region.to_string());
}

TEST(Entrance, TrivialKinds) {
    EXPECT_EQ(solve_entrance(ProfitFunction::constant(1.0), kBase).kind, EntranceKind::EnterImmediately);
    EXPECT_EQ(solve_entrance(ProfitFunction::constant(-1.0), kBase).kind, EntranceKind::NeverEnter);
}

TEST(Regions, IntervalClosedness) {
    IntervalUnion u;
    u.parts.push_back({0.0, 1.0, false, true});
    u.parts.push_back({2.0, kInf, true, false});
    EXPECT_TRUE(u.contains(1.0));
    EXPECT_FALSE(u.contains(1.5));
    EXPECT_TRUE(u.contains(2.0));
    EXPECT_FALSE(u.contains(0.0));
}
