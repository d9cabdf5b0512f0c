#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbmstop/model.hpp"
#include "gbmstop/profit.hpp"
#include "gbmstop/quadrature.hpp"

namespace gbmstop {

enum class ProblemClass {
    TrivialStopNow,       // Pi <= 0 everywhere: stop at once, V = 0
    TrivialNeverStop,     // Pi >= 0 everywhere or v_p^+ infinite
    OneSidedLower,        // stop below gamma
    OneSidedUpper,        // stop above zeta
    TwoSided,             // stop outside ]delta, beta[; delta = 0 or beta = inf flags a degenerate side
    NeverStopDegenerate,  // thresholds degenerate, V = v_p
};

const char* to_string(ProblemClass c);

struct Interval {
    double lo = 0.0;
    double hi = kInf;
    bool lo_closed = false;
    bool hi_closed = false;
    bool contains(double x) const;
};

struct IntervalUnion {
    std::vector<Interval> parts;
    bool contains(double x) const;
    bool empty() const { return parts.empty(); }
    std::string to_string() const;
};

enum class SideStatus { Nondegenerate, Inconclusive, NotApplicable };

struct NondegeneracyReport {
    SideStatus lower = SideStatus::NotApplicable;
    SideStatus upper = SideStatus::NotApplicable;
    bool inconclusive() const {
        return lower == SideStatus::Inconclusive || upper == SideStatus::Inconclusive;
    }
};

/// Sufficient conditions for a positive lower / finite upper threshold: Pi bounded away
/// from zero (negative) at the end and the matching weighted integral diverging there.
NondegeneracyReport nondegeneracy_check(const ProfitFunction& pf, const Roots& roots);

struct Thresholds {
    ProblemClass problem_class = ProblemClass::TrivialStopNow;
    std::optional<double> gamma;
    std::optional<double> zeta;
    std::optional<double> delta;
    std::optional<double> beta;
    std::string notes;
};

ProblemClass classify(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

/// Classification and threshold solve in one pass.
Thresholds solve_thresholds(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

/// Root of int_gamma^inf s^(-d2-1) Pi ds = 0 in ]0, x1l].
double solve_gamma(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

/// Root of int_0^zeta s^(-d1-1) Pi ds = 0 in [x2r, inf[.
double solve_zeta(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

struct TwoSidedThresholds {
    double delta = 0.0;  // 0 when the lower side is degenerate
    double beta = kInf;  // inf when the upper side is degenerate
};

/// Solves int_delta^beta s^(-d_i-1) Pi ds = 0, i = 1, 2. Throws BracketFailureError when
/// both sides are degenerate.
TwoSidedThresholds solve_two_sided(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

/// v_p(x) = 2/(s2 (d2-d1)) [x^d1 int_0^x s^(-d1-1) Pi + x^d2 int_x^inf s^(-d2-1) Pi]
class ParticularSolution {
public:
    /// Throws NotIntegrableError unless both v_p^+ and v_p^- are finite.
    ParticularSolution(ProfitFunction pf, GbmParams params, QuadConfig cfg = {});
    double operator()(double x) const { return value(x); }
    double value(double x) const;
    double derivative(double x) const;

private:
    ProfitFunction pf_;
    GbmParams params_;
    QuadConfig cfg_;
};

ParticularSolution particular_solution(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

class StoppingSolution {
public:
    ProblemClass problem_class = ProblemClass::TrivialStopNow;
    std::optional<double> gamma;
    std::optional<double> zeta;
    std::optional<double> delta;
    std::optional<double> beta;
    std::optional<double> a1;
    std::optional<double> a2;
    IntervalUnion stopping_region;
    IntervalUnion continuation_region;
    std::string notes;

    double value(double x) const;
    /// V' from the differentiated kernel representation.
    double derivative(double x) const;
    bool in_stopping_region(double x) const { return stopping_region.contains(x); }

    /// Anchor x* of the kernel representation, if V is represented that way.
    std::optional<double> anchor() const { return anchor_; }
    /// Anchor used at x. A two-sided region with both ends finite is evaluated from delta below
    /// switch_point() and from beta above it, where the amplification of threshold error is equal.
    std::optional<double> anchor_for(double x) const;
    std::optional<double> switch_point() const { return switch_; }
    const ProfitFunction& profit() const { return pf_; }
    const GbmParams& params() const { return params_; }
    const QuadConfig& quad_config() const { return cfg_; }

private:
    enum class Mode { Zero, Infinite, Particular, Kernel };
    StoppingSolution(ProfitFunction pf, GbmParams params, QuadConfig cfg)
        : pf_(std::move(pf)), params_(params), cfg_(cfg) {}
    friend StoppingSolution build_value_function(const ProfitFunction&, const GbmParams&, const Thresholds&,
                                                 const QuadConfig&);

    ProfitFunction pf_;
    GbmParams params_;
    QuadConfig cfg_;
    Mode mode_ = Mode::Zero;
    std::optional<double> anchor_;
    std::optional<double> anchor2_;
    std::optional<double> switch_;
    std::optional<ParticularSolution> vp_;
};

StoppingSolution build_value_function(const ProfitFunction& pf, const GbmParams& params, const Thresholds& th,
                                      const QuadConfig& cfg = {});

/// solve_thresholds followed by build_value_function.
StoppingSolution solve(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

struct Coefficients {
    double a1 = 0.0;
    double a2 = 0.0;
};

/// a1 = c int_0^x* s^(-d1-1) Pi, a2 = c int_x*^inf s^(-d2-1) Pi with c = -2/(s2 (d2-d1)).
Coefficients coefficients(const ProfitFunction& pf, const GbmParams& params, double x_star,
                          const QuadConfig& cfg = {});

/// A1 = (s2/2) v(x*), A2 = (s2/2) x* v'(x*): initial data in the log variable t = log(x/x*).
struct OdeInitialData {
    double x_star = 1.0;
    double A1 = 0.0;
    double A2 = 0.0;
};

/// General solution of (s2/2) x^2 v'' + alpha x v' - r v = -Pi through the given initial data.
class OdeSolution {
public:
    OdeSolution(ProfitFunction pf, GbmParams params, OdeInitialData init, QuadConfig cfg = {});
    double value(double x) const;
    double derivative(double x) const;

private:
    ProfitFunction pf_;
    GbmParams params_;
    OdeInitialData init_;
    QuadConfig cfg_;
};

OdeSolution ode_general_solution(const ProfitFunction& pf, const GbmParams& params, const OdeInitialData& init,
                                 const QuadConfig& cfg = {});

enum class EntranceKind { Regular, EnterImmediately, NeverEnter };

const char* to_string(EntranceKind k);

/// Optimal entrance: G = v_p + V_{-Pi}; entry is immediate on the stopping region of -Pi.
class EntranceSolution {
public:
    EntranceKind kind = EntranceKind::Regular;
    IntervalUnion entrance_region;

    double value(double x) const;
    /// v_p of the original profit; infinite when v_p^+ is.
    double vp(double x) const;
    const std::optional<StoppingSolution>& negated_problem() const { return negated_; }

private:
    friend EntranceSolution solve_entrance(const ProfitFunction&, const GbmParams&, const QuadConfig&);
    std::optional<StoppingSolution> negated_;
    std::optional<ParticularSolution> vp_;
};

EntranceSolution solve_entrance(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg = {});

/// Grid search of the infimum/supremum definitions of gamma and zeta.
/// estimate is the extreme grid point where the defining condition holds; at_grid_edge
/// means the condition held at the outermost point, i.e. the threshold may be degenerate.
struct ProbeReport {
    double estimate = kInf;
    bool at_grid_edge = false;
    bool found = false;
};

ProbeReport definition_probe_lower(const ProfitFunction& pf, const GbmParams& params, int grid = 25,
                                   const QuadConfig& cfg = {});
ProbeReport definition_probe_upper(const ProfitFunction& pf, const GbmParams& params, int grid = 25,
                                   const QuadConfig& cfg = {});

}  // namespace gbmstop
