#include <cmath>

#include <gtest/gtest.h>

#include "gbmstop/verify.hpp"
#include "oracles.hpp"

using namespace gbmstop;

namespace {

const GbmParams kBase(oracle::kR, oracle::kAlpha, oracle::kSigma2);

ProfitFunction one_sided_profit() { return gross_profit(1, 10, 1, 2, 4); }
ProfitFunction two_sided_profit() { return gross_profit(1, 10, 1, 8, -5); }

StoppingSolution corrupted(const ProfitFunction& pf, const GbmParams& p, double factor) {
    Thresholds th = solve_thresholds(pf, p);
    for (auto* t : {&th.gamma, &th.zeta, &th.delta, &th.beta})
        if (*t) **t *= factor;
    return build_value_function(pf, p, th);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, (i + 0.5) / n));
    return g;
}

}  // namespace

TEST(TruncatedMoment, UntruncatedIsThePowerMoment) {
    for (double beta : {-1.5, 0.0, 0.5, 2.0}) {
        for (double t : {0.5, 3.0}) {
            const double x = 1.7;
            const double full = std::pow(x, beta) * std::exp(char_poly(kBase, beta) * t);
            EXPECT_NEAR(truncated_moment(kBase, x, {beta, RegionKind::Above, 0.0, kInf, t}), full, 1e-13 * full);
            EXPECT_NEAR(truncated_moment(kBase, x, {beta, RegionKind::Below, 0.0, kInf, t}), full, 1e-13 * full);
            const double split = truncated_moment(kBase, x, {beta, RegionKind::Above, 2.0, kInf, t}) +
                                 truncated_moment(kBase, x, {beta, RegionKind::Below, 0.0, 2.0, t});
            EXPECT_NEAR(split, full, 1e-13 * full);
        }
    }
}

TEST(TruncatedMoment, AgreesWithMonteCarlo) {
    int cell = 0;
    for (double beta : {-1.0, 0.5, 1.5}) {
        for (RegionKind kind : {RegionKind::Above, RegionKind::Below, RegionKind::Between}) {
            const TruncatedMomentSpec spec{beta, kind, 0.6, 3.0, 2.0};
            const double exact = truncated_moment(kBase, 1.0, spec);
            const McEstimate mc = mc_truncated_moment(kBase, 1.0, spec, 100000, 100 + cell++);
            EXPECT_LE(std::fabs(mc.mean - exact), 3.0 * mc.std_error) << beta << " " << int(kind);
        }
    }
}

TEST(TruncatedMoment, DecaysInsideTheRoots) {
    const auto d = moment_decay(kBase, 2.0, {0.5, RegionKind::Above, 1.0, kInf, 0.0}, {10, 50, 250});
    ASSERT_EQ(d.size(), 3u);
    EXPECT_GT(d[0], d[1]);
    EXPECT_GT(d[1], d[2]);
    const auto b = moment_decay(kBase, 2.0, {0.0, RegionKind::Between, 1.0, 4.0, 0.0}, {10, 50, 250});
    EXPECT_GT(b[0], b[1]);
    EXPECT_GT(b[1], b[2]);
}

TEST(SmoothFit, HoldsAtSolvedThresholds) {
    for (const ProfitFunction& pf : {one_sided_profit(), two_sided_profit()}) {
        const SmoothFitReport rep = smooth_fit_check(solve(pf, kBase));
        EXPECT_TRUE(rep.passed) << rep.message;
    }
}

TEST(SmoothFit, DetectsAMovedThreshold) {
    for (const ProfitFunction& pf : {one_sided_profit(), two_sided_profit()}) {
        const SmoothFitReport rep = smooth_fit_check(corrupted(pf, kBase, 1.1));
        EXPECT_FALSE(rep.passed);
        EXPECT_GT(rep.derivative_gap, 1e-3);
    }
}

TEST(Hjb, ResidualAndSignsOnBothExamples) {
    for (const ProfitFunction& pf : {one_sided_profit(), two_sided_profit()}) {
        const StoppingSolution sol = solve(pf, kBase);
        const HjbReport rep = hjb_residual(sol, log_grid(0.03, 300.0, 120));
        EXPECT_TRUE(rep.passed);
        int cont = 0, stop = 0;
        for (const HjbPoint& p : rep.points) {
            EXPECT_TRUE(p.ok) << p.x << ": " << p.violation;
            (p.in_continuation ? cont : stop)++;
        }
        EXPECT_GT(cont, 0);
        EXPECT_GT(stop, 0);
    }
}

TEST(Hjb, ContinuationValueMatchesOracle) {
    const StoppingSolution sol = solve(two_sided_profit(), kBase);
    const HjbReport rep = hjb_residual(sol, {1.0, 10.0});
    EXPECT_NEAR(rep.points[0].value, oracle::two_sided::value_at_1, 1e-8);
    EXPECT_NEAR(rep.points[1].value, oracle::two_sided::value_at_10, 1e-8);
}

TEST(Transversality, PassesForBothExamples) {
    for (const ProfitFunction& pf : {one_sided_profit(), two_sided_profit()}) {
        const TransversalityReport rep = transversality_check(solve(pf, kBase));
        EXPECT_TRUE(rep.passed) << rep.message;
        ASSERT_EQ(rep.decay.size(), 3u);
        EXPECT_GT(rep.decay[0], rep.decay[2]);
    }
}

TEST(Transversality, UnboundedEndRatioFalls) {
    const TransversalityReport rep = transversality_check(solve(one_sided_profit(), kBase));
    ASSERT_GE(rep.ratios.size(), 2u);
    for (std::size_t i = 1; i < rep.ratios.size(); ++i)
        EXPECT_LT(std::fabs(rep.ratios[i].second), std::fabs(rep.ratios[i - 1].second));
    EXPECT_LT(rep.fitted_beta, kBase.roots().d2);
    EXPECT_GT(rep.envelope_beta, kBase.roots().d1);
    EXPECT_LT(rep.envelope_beta, kBase.roots().d2);
}

TEST(Simulation, TerminalLawIsLognormal) {
    const double x = 2.0, t = 1.0;
    const auto xs = simulate_terminal(kBase, x, t, 0.01, 40000, 11);
    double s = 0, s2 = 0, l = 0, l2 = 0;
    for (double v : xs) {
        s += v;
        s2 += v * v;
        l += std::log(v);
        l2 += std::log(v) * std::log(v);
    }
    const double n = double(xs.size());
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_LE(std::fabs(mean - x * std::exp(kBase.alpha() * t)), 3 * se);
    const double lm = l / n, lse = std::sqrt((l2 / n - lm * lm) / n);
    const double mu = std::log(x) + (kBase.alpha() - kBase.sigma2() / 2) * t;
    EXPECT_LE(std::fabs(lm - mu), 3 * lse);
    EXPECT_NEAR(l2 / n - lm * lm, kBase.sigma2() * t, 0.02 * kBase.sigma2());
}

TEST(Simulation, WorkerCountDoesNotChangeResults) {
    const StoppingSolution sol = solve(two_sided_profit(), kBase);
    McConfig mc;
    mc.n_paths = 3000;
    mc.dt = 0.01;
    mc.workers = 1;
    const McEstimate one = estimate_J(sol.profit(), kBase, sol.stopping_region, 3.0, mc);
    mc.workers = 3;
    const McEstimate three = estimate_J(sol.profit(), kBase, sol.stopping_region, 3.0, mc);
    EXPECT_EQ(one.mean, three.mean);
    EXPECT_EQ(one.std_error, three.std_error);
    mc.seed += 1;
    EXPECT_NE(estimate_J(sol.profit(), kBase, sol.stopping_region, 3.0, mc).mean, one.mean);
}

TEST(Simulation, EstimateMatchesValue) {
    const StoppingSolution sol = solve(two_sided_profit(), kBase);
    McConfig mc;
    mc.n_paths = 20000;
    mc.dt = 0.01;
    const McEstimate e = estimate_J(sol.profit(), kBase, sol.stopping_region, 3.0, mc);
    EXPECT_LE(std::fabs(e.mean - sol.value(3.0)), 3 * e.std_error) << e.mean << " vs " << sol.value(3.0);
    EXPECT_LE(e.truncation_bound, e.std_error);
}

TEST(Simulation, HalvingDtMovesTheMeanLessThanOneSe) {
    const StoppingSolution sol = solve(two_sided_profit(), kBase);
    McConfig mc;
    mc.n_paths = 20000;
    mc.dt = 0.01;
    const DtHalvingReport rep = dt_halving_check(sol.profit(), kBase, sol.stopping_region, 3.0, mc);
    EXPECT_TRUE(rep.within_one_se) << rep.diff_mean << " vs " << rep.coarse.std_error;
}

TEST(Simulation, TruncationDominatesWhenEnvelopeGrows) {
    // r < 0 with a constant profit: e^(-rt) grows, so no horizon bounds the tail.
    const GbmParams p(-0.05, -0.2, 0.1);
    const ProfitFunction pf = ProfitFunction::constant(1.0);
    EXPECT_TRUE(std::isinf(truncation_envelope(pf, p, 1.0, 0.0)));
    McConfig mc;
    mc.n_paths = 500;
    mc.dt = 0.05;
    EXPECT_THROW(estimate_J(pf, p, IntervalUnion{}, 1.0, mc), TruncationDominatesError);
    mc.t_max = 5.0;
    const McEstimate e = estimate_J(pf, p, IntervalUnion{}, 1.0, mc);
    EXPECT_TRUE(std::isinf(e.truncation_bound));
}

TEST(Simulation, EnvelopeIsFiniteAndDecreasing) {
    const ProfitFunction pf = one_sided_profit();
    const double b0 = truncation_envelope(pf, kBase, 1.0, 0.0);
    const double b1 = truncation_envelope(pf, kBase, 1.0, 50.0);
    ASSERT_TRUE(std::isfinite(b0));
    EXPECT_LT(b1, b0);
    EXPECT_GT(b1, 0.0);
}

TEST(Dominance, ZeroShiftIsTheOptimalPolicy) {
    const StoppingSolution sol = solve(two_sided_profit(), kBase);
    McConfig mc;
    mc.n_paths = 4000;
    mc.dt = 0.01;
    const DominanceReport rep = dominance_check(sol, 3.0, {0.0, 0.3}, mc);
    ASSERT_EQ(rep.rows.size(), 2u);
    EXPECT_EQ(rep.rows[0].diff_mean, 0.0);
    EXPECT_TRUE(rep.rows[0].dominated);
    const IntervalUnion same = shifted_region(sol, 1.0);
    for (double x : {0.2, 0.36, 1.0, 23.0, 23.2, 40.0}) EXPECT_EQ(same.contains(x), sol.stopping_region.contains(x));
}
