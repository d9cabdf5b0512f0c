#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbmstop/solver.hpp"

namespace gbmstop {

/// max(1, sup |Pi|) over a decade either side of the solution's thresholds.
double solution_scale(const StoppingSolution& sol);

// ---------------------------------------------------------------- moments

enum class RegionKind { Above, Below, Between };

/// E_x[e^(-rt) X_t^beta 1{X_t in region}]; Above uses a, Below uses b, Between uses both.
struct TruncatedMomentSpec {
    double beta = 0.0;
    RegionKind region = RegionKind::Between;
    double a = 0.0;
    double b = kInf;
    double t = 1.0;
};

/// Closed form x^beta e^(P(beta) t) [H(t;b) - H(t;a)] with
/// H(t;c) = Phi(log(c/x)/(sigma sqrt t) + sigma ((d1+d2)/2 - beta) sqrt t).
double truncated_moment(const GbmParams& params, double x, const TruncatedMomentSpec& spec);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double truncation_bound = 0.0;
    double t_max = 0.0;
    std::int64_t n_stopped = 0;
};

/// Monte Carlo of the same expectation from exact lognormal samples of X_t.
McEstimate mc_truncated_moment(const GbmParams& params, double x, const TruncatedMomentSpec& spec,
                               std::int64_t n_paths, std::uint64_t seed);

// ---------------------------------------------------------- transversality

struct TransversalityReport {
    bool passed = false;
    /// (x, V(x)/x^d) on the geometric grid toward the unbounded end; d = d2 at infinity, d1 at 0.
    std::vector<std::pair<double, double>> ratios;
    double fitted_beta = 0.0;   // local growth exponent of V at the far end of the grid
    double envelope_beta = 0.0; // exponent used for the moment decay check, strictly inside (d1, d2)
    /// truncated_moment(envelope_beta, region beyond the threshold, t) at t = 10, 50, 250.
    std::vector<double> decay;
    std::string message;
};

TransversalityReport transversality_check(const StoppingSolution& sol);

/// truncated_moment at each t in times.
std::vector<double> moment_decay(const GbmParams& params, double x, TruncatedMomentSpec spec,
                                 const std::vector<double>& times);

// --------------------------------------------------------------- smooth fit

struct SmoothFitReport {
    bool passed = false;
    double scale = 1.0;
    double value_gap = 0.0;       // |V(x*)| from the continuation side
    double derivative_gap = 0.0;  // |V'(x*)| from the continuation side
    double at = 0.0;              // where the gaps were measured
    std::string message;
};

/// Continuation-side V and V' at the free boundary for the policy defined by the solution's
/// thresholds. For a two-sided region the representations anchored at delta and at beta are
/// compared where their round-off amplification is equal.
SmoothFitReport smooth_fit_check(const StoppingSolution& sol, double tol = 1e-8);

// ---------------------------------------------------------------------- HJB

struct HjbPoint {
    double x = 0.0;
    bool in_continuation = false;
    double value = 0.0;
    double d1v = 0.0;       // V'
    double d2v = 0.0;       // V''
    double residual = 0.0;  // -L V - Pi
    double richardson_gap = 0.0;
    bool ok = false;
    std::string violation;
};

struct HjbReport {
    bool passed = false;
    double scale = 1.0;
    double max_continuation_residual = 0.0;
    std::vector<HjbPoint> points;
};

/// -L V - Pi with L V = (s2/2) x^2 V'' + alpha x V' - r V, compared with tol times the largest of
/// scale and the three terms of L V. Derivatives come from central
/// differences with h = max(1e-5 x, 1e-7) and h/2 (Richardson). The difference quotients are
/// formed from the power/integral decomposition of V so quadrature error in the long integrals
/// only moves homogeneous coefficients and drops out of the residual.
HjbReport hjb_residual(const StoppingSolution& sol, const std::vector<double>& grid, double tol = 1e-5);

// -------------------------------------------------------------- Monte Carlo

struct McConfig {
    std::int64_t n_paths = 200000;
    double dt = 1e-3;
    std::optional<double> t_max;  // chosen from the growth envelope when empty
    std::uint64_t seed = 20240601;
    int workers = 0;  // 0: hardware concurrency; results do not depend on it
};

/// X at the first grid time >= t on each of n_paths paths, stepped exactly as the policy simulator does.
std::vector<double> simulate_terminal(const GbmParams& params, double x, double t, double dt, std::int64_t n_paths,
                                      std::uint64_t seed);

/// Upper bound on E_x int_t^inf e^(-rs) |Pi(X_s)| ds from |Pi(y)| <= M (y^p0 + 1 + y^pinf).
/// Infinite when a needed moment grows.
double truncation_envelope(const ProfitFunction& pf, const GbmParams& params, double x, double t);

/// J(x, tau) for the first grid time in the policy's stopping region, truncated at t_max.
/// Throws TruncationDominatesError if the truncation bound exceeds the standard error.
McEstimate estimate_J(const ProfitFunction& pf, const GbmParams& params, const IntervalUnion& stopping_region,
                      double x, const McConfig& mc = {});

/// All policies on the same paths. diff_* refer to estimate[i] - estimate[0].
struct McComparison {
    std::vector<McEstimate> estimates;
    std::vector<double> diff_mean;
    std::vector<double> diff_se;
};

McComparison estimate_J_common(const ProfitFunction& pf, const GbmParams& params,
                               const std::vector<IntervalUnion>& stopping_regions, double x, const McConfig& mc = {});

/// The same Brownian paths sampled at dt and dt/2 (each coarse increment is the sum of two fine
/// ones), so the difference isolates the discretization bias.
struct DtHalvingReport {
    McEstimate coarse;
    McEstimate fine;
    double diff_mean = 0.0;  // fine - coarse
    double diff_se = 0.0;
    bool within_one_se = false;  // |diff_mean| < coarse.std_error
};

DtHalvingReport dt_halving_check(const ProfitFunction& pf, const GbmParams& params,
                                 const IntervalUnion& stopping_region, double x, const McConfig& mc = {});

struct DominanceRow {
    double shift = 0.0;
    McEstimate estimate;
    double diff_mean = 0.0;  // J_shifted - J_optimal
    double diff_se = 0.0;
    bool dominated = false;  // diff_mean <= 2 diff_se
};

struct DominanceReport {
    bool passed = false;
    McEstimate optimal;
    std::vector<DominanceRow> rows;
};

/// Every threshold is scaled by (1 + shift); the optimal policy must not be beaten by more than
/// two standard errors of the common-random-number difference.
DominanceReport dominance_check(const StoppingSolution& sol, double x, const std::vector<double>& shifts,
                                const McConfig& mc = {});

/// Stopping region of the threshold policy with every threshold scaled by factor.
IntervalUnion shifted_region(const StoppingSolution& sol, double factor);

}  // namespace gbmstop
