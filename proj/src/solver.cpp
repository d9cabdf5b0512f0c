#include "gbmstop/solver.hpp"

#include <cmath>
#include <sstream>

#include "gbmstop/rootfind.hpp"

namespace gbmstop {

namespace {

constexpr double kTinyBracket = 1e-290;
constexpr double kHugeBracket = 1e290;
constexpr double kRootTol = 1e-12;

double W(const ProfitFunction& pf, double d, double a, double b, const QuadConfig& cfg) {
    return weighted_integral(pf, d, a, b, cfg).value;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

// Root of int_x^inf s^(-d-1) Pi = 0 below x1l, given F(x1l) = Fx1l >= 0 and F(0+) < 0.
double lower_root(const ProfitFunction& pf, double d, double x1l, double Fx1l, const QuadConfig& cfg,
                  const char* what) {
    if (Fx1l == 0.0) return x1l;
    double lo = x1l, Flo = Fx1l;
    while (Flo >= 0.0) {
        const double next = 0.5 * lo;
        if (next < kTinyBracket) throw BracketFailureError(std::string(what) + ": no sign change above 1e-290");
        Flo += W(pf, d, next, lo, cfg);
        lo = next;
    }
    auto f = [&](double x) { return Fx1l + W(pf, d, x, x1l, cfg); };
    return find_root_log(f, lo, x1l, Flo, Fx1l, kRootTol, what);
}

// Root of base + int_x0^x s^(-d-1) Pi = 0 above x0, given base >= 0 and a negative limit.
double upper_root(const ProfitFunction& pf, double d, double x0, double base, const QuadConfig& cfg,
                  const char* what) {
    if (base == 0.0) return x0;
    double hi = x0, Hhi = base;
    while (Hhi >= 0.0) {
        const double next = 2.0 * hi;
        if (next > kHugeBracket) throw BracketFailureError(std::string(what) + ": no sign change below 1e290");
        Hhi += W(pf, d, hi, next, cfg);
        hi = next;
    }
    auto f = [&](double x) { return base + W(pf, d, x0, x, cfg); };
    return find_root_log(f, x0, hi, base, Hhi, kRootTol, what);
}

struct TwoSidedOutcome {
    bool both_degenerate = false;
    double delta = 0.0;
    double beta = kInf;
};

TwoSidedOutcome two_sided_impl(const ProfitFunction& pf, const Roots& roots, const SignStructure& S,
                               const QuadConfig& cfg) {
    const double d1 = roots.d1, d2 = roots.d2;
    const double x1l = S.x1l, x2r = S.x2r;
    const bool F0 = converges_at_zero(pf, d2);

    // The outer unknown is beta. delta(beta) solves int_delta^beta s^(-d2-1) Pi = 0, which is
    // well conditioned in delta; it is 0 when int_0^beta >= 0 (lower side degenerate) and
    // clamps at x1l when int_x1l^beta <= 0. R(beta) = int_delta(beta)^beta s^(-d1-1) Pi then
    // decreases in beta and is well conditioned even where the d2 equation is flat in beta.
    auto delta_of = [&](double beta) {
        const double A = W(pf, d2, x1l, beta, cfg);
        if (A <= 0.0) return x1l;
        if (F0 && A + W(pf, d2, 0.0, x1l, cfg) >= 0.0) return 0.0;
        return lower_root(pf, d2, x1l, A, cfg, "delta");
    };
    auto R = [&](double beta) { return W(pf, d1, delta_of(beta), beta, cfg); };

    // Limit beta -> inf.
    const bool F_inf = converges_at_infinity(pf, d2);
    const double Fx1l = F_inf ? W(pf, d2, x1l, kInf, cfg) : -kInf;
    if (F_inf && Fx1l >= 0.0) {
        const bool d1_inf = converges_at_infinity(pf, d1);
        if (F0 && Fx1l + W(pf, d2, 0.0, x1l, cfg) >= 0.0) {
            if (d1_inf && W(pf, d1, 0.0, kInf, cfg) >= 0.0) return {true, 0.0, kInf};
        } else {
            const double gamma = lower_root(pf, d2, x1l, Fx1l, cfg, "delta");
            if (d1_inf && W(pf, d1, gamma, kInf, cfg) >= 0.0) return {false, gamma, kInf};
        }
    }

    const double R_lo = R(x2r);
    double lo = x2r, hi = x2r, R_hi = R_lo;
    while (R_hi >= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kHugeBracket) throw BracketFailureError("beta: no sign change below 1e290");
        R_hi = R(hi);
    }
    const double R_at_lo = lo == x2r ? R_lo : R(lo);
    const double beta = find_root_log(R, lo, hi, R_at_lo, R_hi, kRootTol, "beta");
    return {false, delta_of(beta), beta};
}

bool lower_degenerate(const ProfitFunction& pf, double d2, const QuadConfig& cfg) {
    return converges_at_zero(pf, d2) && W(pf, d2, 0.0, kInf, cfg) >= 0.0;
}

bool upper_degenerate(const ProfitFunction& pf, double d1, const QuadConfig& cfg) {
    return converges_at_infinity(pf, d1) && W(pf, d1, 0.0, kInf, cfg) >= 0.0;
}

Interval below(double x) { return {0.0, x, false, true}; }
Interval above(double x) { return {x, kInf, true, false}; }
Interval open(double lo, double hi) { return {lo, hi, false, false}; }

}  // namespace

const char* to_string(ProblemClass c) {
    switch (c) {
        case ProblemClass::TrivialStopNow: return "TrivialStopNow";
        case ProblemClass::TrivialNeverStop: return "TrivialNeverStop";
        case ProblemClass::OneSidedLower: return "OneSidedLower";
        case ProblemClass::OneSidedUpper: return "OneSidedUpper";
        case ProblemClass::TwoSided: return "TwoSided";
        case ProblemClass::NeverStopDegenerate: return "NeverStopDegenerate";
    }
    return "?";
}

const char* to_string(EntranceKind k) {
    switch (k) {
        case EntranceKind::Regular: return "Regular";
        case EntranceKind::EnterImmediately: return "EnterImmediately";
        case EntranceKind::NeverEnter: return "NeverEnter";
    }
    return "?";
}

bool Interval::contains(double x) const {
    const bool lo_ok = lo_closed ? x >= lo : x > lo;
    const bool hi_ok = hi_closed ? x <= hi : x < hi;
    return lo_ok && hi_ok;
}

bool IntervalUnion::contains(double x) const {
    for (const auto& p : parts)
        if (p.contains(x)) return true;
    return false;
}

std::string IntervalUnion::to_string() const {
    if (parts.empty()) return "{}";
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Interval& p = parts[i];
        if (i) os << " U ";
        os << (p.lo_closed ? '[' : '(') << p.lo << ", ";
        if (std::isinf(p.hi)) os << "inf"; else os << p.hi;
        os << (p.hi_closed ? ']' : ')');
    }
    return os.str();
}

NondegeneracyReport nondegeneracy_check(const ProfitFunction& pf, const Roots& roots) {
    const SignStructure S = classify_signs(pf);
    NondegeneracyReport rep;
    if (S.kind != SignKind::Regular) return rep;
    if (S.x1l > 0.0) {
        const Tail& t = pf.tail_at_zero();
        const bool away = !t.zero && t.coeff < 0.0 && t.exponent <= 0.0;
        const bool ok = away && (roots.d2 >= 0.0 || t.exponent - roots.d1 <= 0.0);
        rep.lower = ok ? SideStatus::Nondegenerate : SideStatus::Inconclusive;
    }
    if (std::isfinite(S.x2r)) {
        const Tail& t = pf.tail_at_infinity();
        const bool away = !t.zero && t.coeff < 0.0 && t.exponent >= 0.0;
        const bool ok = away && (roots.d1 <= 0.0 || t.exponent - roots.d2 >= 0.0);
        rep.upper = ok ? SideStatus::Nondegenerate : SideStatus::Inconclusive;
    }
    return rep;
}

Thresholds solve_thresholds(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    const SignStructure S = classify_signs(pf);
    const Roots& roots = params.roots();
    Thresholds th;
    if (S.kind == SignKind::AllNonpositive) {
        th.problem_class = ProblemClass::TrivialStopNow;
        return th;
    }
    if (S.kind == SignKind::AllNonnegative || !check_vp_plus_finite(pf, roots)) {
        th.problem_class = ProblemClass::TrivialNeverStop;
        return th;
    }
    const bool lower = S.x1l > 0.0;
    const bool upper = std::isfinite(S.x2r);
    const NondegeneracyReport nd = nondegeneracy_check(pf, roots);

    if (lower && !upper) {
        if (nd.lower == SideStatus::Inconclusive) {
            const ProbeReport pr = definition_probe_lower(pf, params, 13, cfg);
            th.notes = "lower side inconclusive; probe " +
                       (pr.found ? "estimate " + fmt(pr.estimate) + (pr.at_grid_edge ? " at grid edge" : "")
                                 : std::string("found no point"));
            if (lower_degenerate(pf, roots.d2, cfg)) {
                th.problem_class = ProblemClass::NeverStopDegenerate;
                return th;
            }
        }
        th.problem_class = ProblemClass::OneSidedLower;
        th.gamma = solve_gamma(pf, params, cfg);
        return th;
    }
    if (upper && !lower) {
        if (nd.upper == SideStatus::Inconclusive) {
            const ProbeReport pr = definition_probe_upper(pf, params, 13, cfg);
            th.notes = "upper side inconclusive; probe " +
                       (pr.found ? "estimate " + fmt(pr.estimate) + (pr.at_grid_edge ? " at grid edge" : "")
                                 : std::string("found no point"));
            if (upper_degenerate(pf, roots.d1, cfg)) {
                th.problem_class = ProblemClass::NeverStopDegenerate;
                return th;
            }
        }
        th.problem_class = ProblemClass::OneSidedUpper;
        th.zeta = solve_zeta(pf, params, cfg);
        return th;
    }

    const TwoSidedOutcome o = two_sided_impl(pf, roots, S, cfg);
    if (o.both_degenerate) {
        th.problem_class = ProblemClass::NeverStopDegenerate;
        th.notes = "both sides degenerate";
        return th;
    }
    th.problem_class = ProblemClass::TwoSided;
    th.delta = o.delta;
    th.beta = o.beta;
    if (o.delta == 0.0) th.notes = "lower side degenerate (delta = 0)";
    if (std::isinf(o.beta)) th.notes = "upper side degenerate (beta = inf)";
    return th;
}

ProblemClass classify(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    return solve_thresholds(pf, params, cfg).problem_class;
}

double solve_gamma(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    const SignStructure S = classify_signs(pf);
    if (S.kind != SignKind::Regular || !(S.x1l > 0.0) || std::isfinite(S.x2r))
        throw NotApplicableError("gamma needs Pi < 0 exactly near 0");
    const double d2 = params.roots().d2;
    const double Fx1l = W(pf, d2, S.x1l, kInf, cfg);
    if (Fx1l < 0.0) throw BracketFailureError("gamma: integral from x1l is negative (" + fmt(Fx1l) + ")");
    if (lower_degenerate(pf, d2, cfg)) throw BracketFailureError("gamma: degenerate, the integral from 0 is >= 0");
    return lower_root(pf, d2, S.x1l, Fx1l, cfg, "gamma");
}

double solve_zeta(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    const SignStructure S = classify_signs(pf);
    if (S.kind != SignKind::Regular || S.x1l > 0.0 || !std::isfinite(S.x2r))
        throw NotApplicableError("zeta needs Pi < 0 exactly near infinity");
    const double d1 = params.roots().d1;
    const double Hx2r = W(pf, d1, 0.0, S.x2r, cfg);
    if (Hx2r < 0.0) throw BracketFailureError("zeta: integral up to x2r is negative (" + fmt(Hx2r) + ")");
    if (upper_degenerate(pf, d1, cfg)) throw BracketFailureError("zeta: degenerate, the integral to inf is >= 0");
    return upper_root(pf, d1, S.x2r, Hx2r, cfg, "zeta");
}

TwoSidedThresholds solve_two_sided(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    const SignStructure S = classify_signs(pf);
    if (S.kind != SignKind::Regular || !(S.x1l > 0.0) || !std::isfinite(S.x2r))
        throw NotApplicableError("two-sided thresholds need Pi < 0 near 0 and near infinity");
    const TwoSidedOutcome o = two_sided_impl(pf, params.roots(), S, cfg);
    if (o.both_degenerate) throw BracketFailureError("two-sided: both sides degenerate");
    return {o.delta, o.beta};
}

ParticularSolution::ParticularSolution(ProfitFunction pf, GbmParams params, QuadConfig cfg)
    : pf_(std::move(pf)), params_(params), cfg_(cfg) {
    if (!check_vp_plus_finite(pf_, params_.roots()) || !check_vp_minus_finite(pf_, params_.roots()))
        throw NotIntegrableError("v_p is not finite: E int e^(-rt) |Pi(X_t)| dt diverges");
}

double ParticularSolution::value(double x) const {
    if (!(x > 0.0)) throw BadParametersError("v_p needs x > 0");
    const Roots& rt = params_.roots();
    const double k = 2.0 / (params_.sigma2() * (rt.d2 - rt.d1));
    const double A = W(pf_, rt.d1, 0.0, x, cfg_);
    const double B = W(pf_, rt.d2, x, kInf, cfg_);
    const double lx = std::log(x);
    return k * (std::exp(rt.d1 * lx) * A + std::exp(rt.d2 * lx) * B);
}

double ParticularSolution::derivative(double x) const {
    if (!(x > 0.0)) throw BadParametersError("v_p needs x > 0");
    const Roots& rt = params_.roots();
    const double k = 2.0 / (params_.sigma2() * (rt.d2 - rt.d1));
    const double A = W(pf_, rt.d1, 0.0, x, cfg_);
    const double B = W(pf_, rt.d2, x, kInf, cfg_);
    const double lx = std::log(x);
    return k * (rt.d1 * std::exp((rt.d1 - 1.0) * lx) * A + rt.d2 * std::exp((rt.d2 - 1.0) * lx) * B);
}

ParticularSolution particular_solution(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    return ParticularSolution(pf, params, cfg);
}

StoppingSolution build_value_function(const ProfitFunction& pf, const GbmParams& params, const Thresholds& th,
                                      const QuadConfig& cfg) {
    StoppingSolution sol(pf, params, cfg);
    sol.problem_class = th.problem_class;
    sol.gamma = th.gamma;
    sol.zeta = th.zeta;
    sol.delta = th.delta;
    sol.beta = th.beta;
    sol.notes = th.notes;
    using Mode = StoppingSolution::Mode;
    const Interval all{0.0, kInf, false, false};
    switch (th.problem_class) {
        case ProblemClass::TrivialStopNow:
            sol.mode_ = Mode::Zero;
            sol.stopping_region.parts.push_back(all);
            return sol;
        case ProblemClass::TrivialNeverStop:
        case ProblemClass::NeverStopDegenerate:
            sol.continuation_region.parts.push_back(all);
            if (check_vp_plus_finite(pf, params.roots())) {
                sol.mode_ = Mode::Particular;
                sol.vp_.emplace(pf, params, cfg);
                sol.a1 = 0.0;
                sol.a2 = 0.0;
            } else {
                sol.mode_ = Mode::Infinite;
            }
            return sol;
        case ProblemClass::OneSidedLower:
            sol.anchor_ = *th.gamma;
            sol.stopping_region.parts.push_back(below(*th.gamma));
            sol.continuation_region.parts.push_back(open(*th.gamma, kInf));
            break;
        case ProblemClass::OneSidedUpper:
            sol.anchor_ = *th.zeta;
            sol.stopping_region.parts.push_back(above(*th.zeta));
            sol.continuation_region.parts.push_back(open(0.0, *th.zeta));
            break;
        case ProblemClass::TwoSided: {
            const double d = *th.delta, b = *th.beta;
            sol.anchor_ = d > 0.0 ? d : b;
            if (d > 0.0 && std::isfinite(b)) {
                // Solve |Pi(d)| (x/d)^d2 = |Pi(b)| (x/b)^d1 for x.
                const Roots& rt = params.roots();
                const double pd = std::max(std::fabs(pf.eval(d)), 1e-300);
                const double pb = std::max(std::fabs(pf.eval(b)), 1e-300);
                const double lx = (std::log(pb) - std::log(pd) + rt.d2 * std::log(d) - rt.d1 * std::log(b)) /
                                  (rt.d2 - rt.d1);
                sol.anchor2_ = b;
                sol.switch_ = std::min(std::max(std::exp(lx), d), b);
            }
            if (d > 0.0) sol.stopping_region.parts.push_back(below(d));
            if (std::isfinite(b)) sol.stopping_region.parts.push_back(above(b));
            sol.continuation_region.parts.push_back(open(d, b));
            break;
        }
    }
    sol.mode_ = Mode::Kernel;
    try {
        const Coefficients c = coefficients(pf, params, *sol.anchor_, cfg);
        sol.a1 = c.a1;
        sol.a2 = c.a2;
    } catch (const DivergentError&) {
        // a1 or a2 undefined when v_p is infinite; V itself is unaffected.
    }
    return sol;
}

StoppingSolution solve(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    return build_value_function(pf, params, solve_thresholds(pf, params, cfg), cfg);
}

double StoppingSolution::value(double x) const {
    if (!(x > 0.0)) throw BadParametersError("V needs x > 0");
    switch (mode_) {
        case Mode::Zero: return 0.0;
        case Mode::Infinite: return kInf;
        case Mode::Particular: return vp_->value(x);
        case Mode::Kernel: break;
    }
    if (stopping_region.contains(x)) return 0.0;
    const Roots& rt = params_.roots();
    const double c = -2.0 / (params_.sigma2() * (rt.d2 - rt.d1));
    return c * kernel_integral(pf_, rt, *anchor_for(x), x, cfg_).value;
}

std::optional<double> StoppingSolution::anchor_for(double x) const {
    if (switch_ && x > *switch_) return anchor2_;
    return anchor_;
}

double StoppingSolution::derivative(double x) const {
    if (!(x > 0.0)) throw BadParametersError("V' needs x > 0");
    switch (mode_) {
        case Mode::Zero: return 0.0;
        case Mode::Infinite: return kInf;
        case Mode::Particular: return vp_->derivative(x);
        case Mode::Kernel: break;
    }
    if (stopping_region.contains(x)) return 0.0;
    const Roots& rt = params_.roots();
    const double c = -2.0 / (params_.sigma2() * (rt.d2 - rt.d1));
    return c / x * kernel_derivative_integral(pf_, rt, *anchor_for(x), x, cfg_).value;
}

Coefficients coefficients(const ProfitFunction& pf, const GbmParams& params, double x_star, const QuadConfig& cfg) {
    if (!(x_star > 0.0) || std::isinf(x_star)) throw BadParametersError("coefficients need a finite x* > 0");
    const Roots& rt = params.roots();
    const double c = -2.0 / (params.sigma2() * (rt.d2 - rt.d1));
    return {c * W(pf, rt.d1, 0.0, x_star, cfg), c * W(pf, rt.d2, x_star, kInf, cfg)};
}

OdeSolution::OdeSolution(ProfitFunction pf, GbmParams params, OdeInitialData init, QuadConfig cfg)
    : pf_(std::move(pf)), params_(params), init_(init), cfg_(cfg) {
    if (!(init_.x_star > 0.0) || std::isinf(init_.x_star)) throw BadParametersError("ODE anchor must be finite and > 0");
}

double OdeSolution::value(double x) const {
    if (!(x > 0.0)) throw BadParametersError("ODE solution needs x > 0");
    const Roots& rt = params_.roots();
    const double k = 2.0 / (params_.sigma2() * (rt.d2 - rt.d1));
    const double t = std::log(x / init_.x_star);
    const double hom = std::exp(rt.d1 * t) * (rt.d2 * init_.A1 - init_.A2) +
                       std::exp(rt.d2 * t) * (init_.A2 - rt.d1 * init_.A1);
    return k * hom - k * kernel_integral(pf_, rt, init_.x_star, x, cfg_).value;
}

double OdeSolution::derivative(double x) const {
    if (!(x > 0.0)) throw BadParametersError("ODE solution needs x > 0");
    const Roots& rt = params_.roots();
    const double k = 2.0 / (params_.sigma2() * (rt.d2 - rt.d1));
    const double t = std::log(x / init_.x_star);
    const double hom = rt.d1 * std::exp(rt.d1 * t) * (rt.d2 * init_.A1 - init_.A2) +
                       rt.d2 * std::exp(rt.d2 * t) * (init_.A2 - rt.d1 * init_.A1);
    return (k * hom - k * kernel_derivative_integral(pf_, rt, init_.x_star, x, cfg_).value) / x;
}

OdeSolution ode_general_solution(const ProfitFunction& pf, const GbmParams& params, const OdeInitialData& init,
                                 const QuadConfig& cfg) {
    return OdeSolution(pf, params, init, cfg);
}

EntranceSolution solve_entrance(const ProfitFunction& pf, const GbmParams& params, const QuadConfig& cfg) {
    EntranceSolution es;
    const Interval all{0.0, kInf, false, false};
    const Roots& rt = params.roots();
    if (!check_vp_plus_finite(pf, rt)) {
        es.kind = EntranceKind::EnterImmediately;
        es.entrance_region.parts.push_back(all);
        return es;
    }
    if (!check_vp_minus_finite(pf, rt)) {
        es.kind = EntranceKind::NeverEnter;
        return es;
    }
    es.vp_.emplace(pf, params, cfg);
    es.negated_.emplace(solve(pf.negated(), params, cfg));
    switch (es.negated_->problem_class) {
        case ProblemClass::TrivialStopNow: es.kind = EntranceKind::EnterImmediately; break;
        case ProblemClass::TrivialNeverStop:
        case ProblemClass::NeverStopDegenerate: es.kind = EntranceKind::NeverEnter; break;
        default: es.kind = EntranceKind::Regular; break;
    }
    es.entrance_region = es.negated_->stopping_region;
    return es;
}

double EntranceSolution::value(double x) const {
    if (!(x > 0.0)) throw BadParametersError("G needs x > 0");
    if (!vp_) return kind == EntranceKind::EnterImmediately ? kInf : 0.0;
    if (kind == EntranceKind::NeverEnter) return 0.0;
    return vp_->value(x) + negated_->value(x);
}

double EntranceSolution::vp(double x) const {
    if (!vp_) return kind == EntranceKind::EnterImmediately ? kInf : -kInf;
    return vp_->value(x);
}

ProbeReport definition_probe_lower(const ProfitFunction& pf, const GbmParams& params, int grid,
                                   const QuadConfig& cfg) {
    const SignStructure S = classify_signs(pf);
    if (S.kind != SignKind::Regular || !(S.x1l > 0.0)) throw NotApplicableError("lower probe needs Pi < 0 near 0");
    if (grid < 2) throw BadParametersError("probe grid needs at least 2 points");
    const double C_max = 1e6 * (std::isfinite(S.x2l) ? S.x2l : std::max(S.x1r, 1.0));
    ProbeReport rep;
    for (int i = 0; i < grid; ++i) {
        const double x = S.x1l * std::pow(1e-6, double(i) / (grid - 1));
        bool ok = false;
        for (int j = 1; j <= grid && !ok; ++j) {
            const double C = x * std::pow(C_max / x, double(j) / grid);
            ok = kernel_integral(pf, params.roots(), x, C, cfg).value >= 0.0;
        }
        if (!ok) {
            if (rep.found) break;
            continue;
        }
        rep.found = true;
        rep.estimate = x;
        rep.at_grid_edge = i == grid - 1;
    }
    return rep;
}

ProbeReport definition_probe_upper(const ProfitFunction& pf, const GbmParams& params, int grid,
                                   const QuadConfig& cfg) {
    const SignStructure S = classify_signs(pf);
    if (S.kind != SignKind::Regular || !std::isfinite(S.x2r))
        throw NotApplicableError("upper probe needs Pi < 0 near infinity");
    if (grid < 2) throw BadParametersError("probe grid needs at least 2 points");
    const double C_min = 1e-6 * (S.x1r > 0.0 ? S.x1r : std::min(S.x2l, 1.0));
    ProbeReport rep;
    rep.estimate = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double x = S.x2r * std::pow(1e6, double(i) / (grid - 1));
        bool ok = false;
        for (int j = 1; j <= grid && !ok; ++j) {
            const double C = x * std::pow(C_min / x, double(j) / grid);
            ok = kernel_integral(pf, params.roots(), x, C, cfg).value >= 0.0;
        }
        if (!ok) {
            if (rep.found) break;
            continue;
        }
        rep.found = true;
        rep.estimate = x;
        rep.at_grid_edge = i == grid - 1;
    }
    return rep;
}

}  // namespace gbmstop
