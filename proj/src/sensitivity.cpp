#include "gbmstop/sensitivity.hpp"

#include <cmath>

namespace gbmstop {

namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

GbmParams perturbed(const GbmParams& p, Param which, double h) {
    if (which == Param::Alpha) return GbmParams(p.r(), p.alpha() + h, p.sigma2());
    return GbmParams(p.r(), p.alpha(), p.sigma2() + h);
}

double solved_threshold(const ProfitFunction& pf, const GbmParams& p, ProblemClass cls, const QuadConfig& cfg) {
    return cls == ProblemClass::OneSidedLower ? solve_gamma(pf, p, cfg) : solve_zeta(pf, p, cfg);
}

double threshold_of(const StoppingSolution& sol) {
    if (sol.problem_class == ProblemClass::OneSidedLower) return *sol.gamma;
    if (sol.problem_class == ProblemClass::OneSidedUpper) return *sol.zeta;
    throw NotApplicableError(std::string("no threshold gradient for class ") + to_string(sol.problem_class));
}

}  // namespace

const char* to_string(Param p) { return p == Param::Alpha ? "alpha" : "sigma2"; }

RootDerivatives root_derivatives(const GbmParams& params) {
    const double s2 = params.sigma2(), a = params.alpha(), r = params.r();
    const Roots& rt = params.roots();
    const double sq = std::sqrt(params.discriminant());
    const double b = s2 / 2.0 - a;
    const double k = 2.0 / (s2 * s2 * (rt.d2 - rt.d1));
    RootDerivatives d;
    d.d_d1_d_alpha = (-1.0 + b / sq) / s2;
    d.d_d2_d_alpha = (-1.0 - b / sq) / s2;
    d.d_d1_d_sigma2 = -k * (a * rt.d1 - r);
    d.d_d2_d_sigma2 = k * (a * rt.d2 - r);
    return d;
}

PredictedSigns predicted_signs(const GbmParams& params) {
    const double r = params.r(), a = params.alpha(), h = params.sigma2() / 2.0;
    PredictedSigns ps;
    SignCell& t = ps.table;
    if (r < 0.0) {
        if (a < h) {
            t.d1_alpha = 1;
            t.d2_alpha = -1;
            t.d1_sigma2 = -1;
            if (a < r) {
                t.d2_sigma2 = -1;
                ps.column = "r<0, alpha<r";
            } else if (a == r) {
                t.d2_sigma2 = 0;
                ps.column = "r<0, alpha=r";
            } else {
                t.d2_sigma2 = 1;
                ps.column = "r<0, r<alpha<s2/2";
            }
        } else {
            t = {-1, 1, 1, -1};
            ps.column = "r<0, alpha>s2/2";
        }
    } else if (r == 0.0) {
        if (a < h) {
            t.d1_alpha = 0;
            t.d2_alpha = -1;
            t.d1_sigma2 = 0;
            t.d2_sigma2 = sgn(a);
            ps.column = a < 0.0 ? "r=0, alpha<0" : (a == 0.0 ? "r=0, alpha=0" : "r=0, 0<alpha<s2/2");
        } else {
            t = {-1, 0, 1, 0};
            ps.column = "r=0, alpha>s2/2";
        }
    } else {
        t.d1_alpha = -1;
        t.d2_alpha = -1;
        t.d1_sigma2 = 1;
        t.d2_sigma2 = a < r ? -1 : (a == r ? 0 : 1);
        ps.column = a < r ? "r>0, alpha<r" : (a == r ? "r>0, alpha=r" : "r>0, alpha>r");
    }
    ps.expected = t;
    // Both roots >= 1 here, so d1 rises and d2 falls with sigma2.
    if (r < 0.0 && a >= r && a < -h) {
        ps.table_defect = true;
        ps.expected.d1_sigma2 = a == r ? 0 : 1;
        ps.expected.d2_sigma2 = -1;
    }
    return ps;
}

double threshold_log_moment(const ProfitFunction& pf, const GbmParams& params, const StoppingSolution& sol,
                            const QuadConfig& cfg) {
    const double x = threshold_of(sol);
    const Roots& rt = params.roots();
    if (sol.problem_class == ProblemClass::OneSidedLower) return log_weighted_integral(pf, rt.d2, x, kInf, cfg).value;
    return log_weighted_integral(pf, rt.d1, 0.0, x, cfg).value;
}

double threshold_gradient(const ProfitFunction& pf, const GbmParams& params, const StoppingSolution& sol,
                          Param which, const QuadConfig& cfg) {
    const double x = threshold_of(sol);
    const double pi = pf.eval(x);
    if (pi == 0.0) throw NotApplicableError("Pi vanishes at the threshold");
    const Roots& rt = params.roots();
    const RootDerivatives rd = root_derivatives(params);
    const double L = threshold_log_moment(pf, params, sol, cfg);
    if (sol.problem_class == ProblemClass::OneSidedLower) {
        const double dd = which == Param::Alpha ? rd.d_d2_d_alpha : rd.d_d2_d_sigma2;
        return -dd * L / (std::exp((-rt.d2 - 1.0) * std::log(x)) * pi);
    }
    const double dd = which == Param::Alpha ? rd.d_d1_d_alpha : rd.d_d1_d_sigma2;
    return dd * L / (std::exp((-rt.d1 - 1.0) * std::log(x)) * pi);
}

GradientCheck check_threshold_gradient(const ProfitFunction& pf, const GbmParams& params,
                                       const StoppingSolution& sol, Param which, double rel_step,
                                       const QuadConfig& cfg) {
    const double x = threshold_of(sol);
    GradientCheck gc;
    gc.formula = threshold_gradient(pf, params, sol, which, cfg);
    const double v = which == Param::Alpha ? params.alpha() : params.sigma2();
    gc.step = rel_step * std::max(std::fabs(v), params.sigma2());
    const double up = solved_threshold(pf, perturbed(params, which, gc.step), sol.problem_class, cfg);
    const double dn = solved_threshold(pf, perturbed(params, which, -gc.step), sol.problem_class, cfg);
    gc.finite_difference = (up - dn) / (2.0 * gc.step);
    const double floor = 100.0 * 1e-12 * x / gc.step;
    gc.agrees = std::fabs(gc.formula - gc.finite_difference) <=
                1e-3 * std::max(std::fabs(gc.formula), std::fabs(gc.finite_difference)) + floor;
    return gc;
}

SensitivityReport sensitivity_report(const ProfitFunction& pf, const GbmParams& params, bool with_fd,
                                     const QuadConfig& cfg) {
    SensitivityReport rep;
    rep.roots = root_derivatives(params);
    rep.predicted_signs = predicted_signs(params);
    const StoppingSolution sol = solve(pf, params, cfg);
    rep.problem_class = sol.problem_class;
    if (sol.problem_class != ProblemClass::OneSidedLower && sol.problem_class != ProblemClass::OneSidedUpper) {
        rep.not_applicable = std::string("no threshold gradient for class ") + to_string(sol.problem_class);
        return rep;
    }
    rep.threshold_name = sol.problem_class == ProblemClass::OneSidedLower ? "gamma" : "zeta";
    rep.threshold = threshold_of(sol);
    try {
        rep.d_threshold_d_alpha = threshold_gradient(pf, params, sol, Param::Alpha, cfg);
        rep.d_threshold_d_sigma2 = threshold_gradient(pf, params, sol, Param::Sigma2, cfg);
        if (with_fd) {
            rep.fd_alpha = check_threshold_gradient(pf, params, sol, Param::Alpha, 1e-4, cfg);
            rep.fd_sigma2 = check_threshold_gradient(pf, params, sol, Param::Sigma2, 1e-4, cfg);
        }
    } catch (const Error& e) {
        rep.not_applicable = e.what();
    }
    return rep;
}

std::vector<SweepRow> sweep(const ProfitFunction& pf, const GbmParams& base, Param vary,
                            const std::vector<double>& grid, const QuadConfig& cfg) {
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double v : grid) {
        SweepRow row;
        row.param_value = v;
        try {
            const GbmParams p = vary == Param::Alpha ? GbmParams(base.r(), v, base.sigma2())
                                                     : GbmParams(base.r(), base.alpha(), v);
            const Thresholds th = solve_thresholds(pf, p, cfg);
            row.problem_class = th.problem_class;
            row.gamma = th.gamma;
            row.zeta = th.zeta;
            row.delta = th.delta;
            row.beta = th.beta;
        } catch (const IllPosedError& e) {
            row.excluded_reason = std::string("ill-posed: ") + e.what();
        } catch (const Error& e) {
            row.excluded_reason = std::string("error: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace gbmstop
