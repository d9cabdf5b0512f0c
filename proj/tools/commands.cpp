#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace gbmstop::cli {

namespace {

using nlohmann::json;

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const IllPosedError& e) {
        err << "ill-posed model: " << e.what() << "\n";
        return kIllPosed;
    } catch (const UnsupportedShapeError& e) {
        err << "unsupported profit: " << e.what() << "\n";
        return kUnsupportedProfit;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kBadInput;
    } catch (const BadParametersError& e) {
        err << "bad input: " << e.what() << "\n";
        return kBadInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

ProblemConfig load_with_overrides(const std::string& path, const Options& opt) {
    ProblemConfig cfg = load_config(path);
    if (opt.tol) {
        if (!(*opt.tol > 0.0)) throw BadParametersError("--tol must be positive");
        cfg.quadrature.rel_tol = *opt.tol;
    }
    if (opt.seed) cfg.mc.seed = *opt.seed;
    if (opt.paths) cfg.mc.n_paths = *opt.paths;
    if (opt.dt) cfg.mc.dt = *opt.dt;
    if (!(cfg.mc.dt > 0.0) || cfg.mc.n_paths < 2) throw BadParametersError("--dt must be positive and --paths >= 2");
    return cfg;
}

StoppingSolution solve_with_options(const ProfitFunction& pf, const GbmParams& p, const ProblemConfig& cfg,
                                    const Options& opt) {
    Thresholds th = solve_thresholds(pf, p, cfg.quadrature);
    if (opt.corrupt_threshold) {
        for (auto* t : {&th.gamma, &th.zeta, &th.delta, &th.beta})
            if (*t) **t *= *opt.corrupt_threshold;
    }
    return build_value_function(pf, p, th, cfg.quadrature);
}

// CSV goes to --out when given, otherwise to out.
template <class Fn>
void with_sink(const Options& opt, std::ostream& out, Fn fn) {
    if (opt.out.empty()) {
        fn(out);
        return;
    }
    std::ofstream f(opt.out);
    if (!f) throw BadParametersError("cannot write " + opt.out);
    fn(f);
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

json json_number(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    return *v;
}

void print_thresholds(std::ostream& out, const StoppingSolution& sol) {
    auto line = [&](const char* name, const std::optional<double>& v) {
        if (v) out << name << " = " << format_double(*v) << "\n";
    };
    line("gamma", sol.gamma);
    line("zeta", sol.zeta);
    line("delta", sol.delta);
    line("beta", sol.beta);
}

std::vector<double> verify_grid(const StoppingSolution& sol, int n) {
    std::vector<double> t;
    for (const auto& v : {sol.gamma, sol.zeta, sol.delta, sol.beta})
        if (v && *v > 0.0 && std::isfinite(*v)) t.push_back(*v);
    double lo = 0.1, hi = 10.0;
    if (!t.empty()) {
        lo = *std::min_element(t.begin(), t.end()) / 10.0;
        hi = *std::max_element(t.begin(), t.end()) * 10.0;
    }
    PointSpec ps;
    ps.lo = lo;
    ps.hi = hi;
    ps.n = n;
    ps.log_spaced = true;
    return ps.points();
}

double default_mc_point(const StoppingSolution& sol) {
    const auto& parts = sol.continuation_region.parts;
    if (parts.empty()) return 1.0;
    const Interval& iv = parts.front();
    if (iv.lo > 0.0 && std::isfinite(iv.hi)) return std::sqrt(iv.lo * iv.hi);
    if (iv.lo > 0.0) return 2.0 * iv.lo;
    if (std::isfinite(iv.hi)) return 0.5 * iv.hi;
    return 1.0;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<double> PointSpec::points() const {
    if (!xs.empty()) return xs;
    if (n < 1) throw BadParametersError("point range needs n >= 1");
    if (n == 1) return {lo};
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const double u = double(i) / (n - 1);
        out.push_back(log_spaced ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u);
    }
    out.back() = hi;
    return out;
}

int cmd_solve(const std::string& config, const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemConfig cfg = load_with_overrides(config, opt);
        const GbmParams p = make_params(cfg);
        const ProfitFunction pf = make_profit(cfg);
        const StoppingSolution sol = solve_with_options(pf, p, cfg, opt);
        const Roots& rt = p.roots();
        out << "d1 = " << format_double(rt.d1) << "\n";
        out << "d2 = " << format_double(rt.d2) << "\n";
        out << "class: " << to_string(sol.problem_class) << "\n";
        print_thresholds(out, sol);
        if (sol.a1) out << "a1 = " << format_double(*sol.a1) << "\n";
        if (sol.a2) out << "a2 = " << format_double(*sol.a2) << "\n";
        out << "stopping region: " << sol.stopping_region.to_string() << "\n";
        out << "continuation region: " << sol.continuation_region.to_string() << "\n";
        if (!sol.notes.empty()) out << "notes: " << sol.notes << "\n";

        json rec = {{"d1", rt.d1},
                    {"d2", rt.d2},
                    {"class", to_string(sol.problem_class)},
                    {"gamma", json_number(sol.gamma)},
                    {"zeta", json_number(sol.zeta)},
                    {"delta", json_number(sol.delta)},
                    {"beta", json_number(sol.beta)},
                    {"a1", json_number(sol.a1)},
                    {"a2", json_number(sol.a2)},
                    {"stopping_region", sol.stopping_region.to_string()},
                    {"continuation_region", sol.continuation_region.to_string()}};
        with_sink(opt, out, [&](std::ostream& o) { o << rec.dump(2) << "\n"; });
        return int(kOk);
    });
}

int cmd_eval(const std::string& config, const PointSpec& pts, const Options& opt, std::ostream& out,
             std::ostream& err) {
    return guarded(err, [&] {
        const ProblemConfig cfg = load_with_overrides(config, opt);
        const std::vector<double> xs = pts.points();
        for (double x : xs)
            if (!(x > 0.0) || !std::isfinite(x))
                throw BadParametersError("x must lie in ]0, inf[ (got " + format_double(x) + ")");
        const GbmParams p = make_params(cfg);
        const ProfitFunction pf = make_profit(cfg);
        const StoppingSolution sol = solve_with_options(pf, p, cfg, opt);
        std::vector<double> bounds;
        for (const auto& v : {sol.gamma, sol.zeta, sol.delta, sol.beta})
            if (v && *v > 0.0 && std::isfinite(*v)) bounds.push_back(*v);
        with_sink(opt, out, [&](std::ostream& o) {
            o << "x,V,V_prime,region,boundary\n";
            for (double x : xs) {
                const bool stop = sol.in_stopping_region(x);
                bool boundary = false;
                for (double b : bounds) boundary = boundary || std::fabs(x - b) <= 1e-12 * b;
                o << format_double(x) << "," << format_double(sol.value(x)) << ","
                  << format_double(stop ? 0.0 : sol.derivative(x)) << "," << (stop ? "stop" : "continue") << ","
                  << (boundary ? 1 : 0) << "\n";
            }
        });
        return int(kOk);
    });
}

int cmd_sweep(const std::string& config, Param vary, const PointSpec& values, const Options& opt, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&] {
        const ProblemConfig cfg = load_with_overrides(config, opt);
        const ProfitFunction pf = make_profit(cfg);
        // The base point itself may be ill-posed; only the swept values need to be admissible.
        const std::vector<double> grid = values.points();
        std::vector<SweepRow> rows;
        for (double v : grid) {
            const double alpha = vary == Param::Alpha ? v : cfg.model.alpha;
            const double sigma2 = vary == Param::Sigma2 ? v : cfg.model.sigma2;
            try {
                const GbmParams p(cfg.model.r, alpha, sigma2);
                auto r = sweep(pf, p, vary, {v}, cfg.quadrature);
                rows.push_back(r.front());
            } catch (const IllPosedError& e) {
                SweepRow row;
                row.param_value = v;
                row.excluded_reason = std::string("ill-posed: ") + e.what();
                rows.push_back(row);
            }
        }
        with_sink(opt, out, [&](std::ostream& o) {
            o << "param_value,class,gamma,zeta,delta,beta,excluded_reason\n";
            for (const SweepRow& r : rows) {
                o << format_double(r.param_value) << "," << (r.problem_class ? to_string(*r.problem_class) : "")
                  << "," << opt_str(r.gamma) << "," << opt_str(r.zeta) << "," << opt_str(r.delta) << ","
                  << opt_str(r.beta) << "," << csv_quote(r.excluded_reason) << "\n";
            }
        });
        return int(kOk);
    });
}

int cmd_sensitivity(const std::string& config, const std::string& which, const Options& opt, std::ostream& out,
                    std::ostream& err) {
    return guarded(err, [&] {
        if (which != "alpha" && which != "sigma2" && which != "both")
            throw BadParametersError("which must be alpha, sigma2 or both");
        const ProblemConfig cfg = load_with_overrides(config, opt);
        const GbmParams p = make_params(cfg);
        const ProfitFunction pf = make_profit(cfg);
        const SensitivityReport rep = sensitivity_report(pf, p, true, cfg.quadrature);
        const PredictedSigns& ps = rep.predicted_signs;
        out << "class: " << to_string(rep.problem_class) << "\n";
        out << "sign cell: " << ps.column << (ps.table_defect ? " (tabulated sigma2 signs do not hold here)" : "")
            << "\n";
        if (rep.threshold) out << rep.threshold_name << " = " << format_double(*rep.threshold) << "\n";
        if (!rep.not_applicable.empty()) out << "threshold gradient: not applicable (" << rep.not_applicable << ")\n";

        struct Row {
            Param p;
            double dd1, dd2;
            std::optional<double> grad;
            std::optional<GradientCheck> fd;
            int t1, t2, e1, e2;
        };
        std::vector<Row> rows;
        if (which != "sigma2")
            rows.push_back({Param::Alpha, rep.roots.d_d1_d_alpha, rep.roots.d_d2_d_alpha, rep.d_threshold_d_alpha,
                            rep.fd_alpha, ps.table.d1_alpha, ps.table.d2_alpha, ps.expected.d1_alpha,
                            ps.expected.d2_alpha});
        if (which != "alpha")
            rows.push_back({Param::Sigma2, rep.roots.d_d1_d_sigma2, rep.roots.d_d2_d_sigma2, rep.d_threshold_d_sigma2,
                            rep.fd_sigma2, ps.table.d1_sigma2, ps.table.d2_sigma2, ps.expected.d1_sigma2,
                            ps.expected.d2_sigma2});
        for (const Row& r : rows) {
            out << "d d1/d " << to_string(r.p) << " = " << format_double(r.dd1) << ", d d2/d " << to_string(r.p)
                << " = " << format_double(r.dd2) << "\n";
            if (r.grad) {
                out << "d " << rep.threshold_name << "/d " << to_string(r.p) << " = " << format_double(*r.grad);
                if (r.fd)
                    out << " (finite difference " << format_double(r.fd->finite_difference) << ", "
                        << (r.fd->agrees ? "agrees" : "DISAGREES") << ")";
                out << "\n";
            }
        }
        with_sink(opt, out, [&](std::ostream& o) {
            o << "param,d_d1,d_d2,threshold,d_threshold,finite_difference,fd_agrees,table_sign_d1,table_sign_d2,"
                 "expected_sign_d1,expected_sign_d2\n";
            for (const Row& r : rows) {
                o << to_string(r.p) << "," << format_double(r.dd1) << "," << format_double(r.dd2) << ","
                  << opt_str(rep.threshold) << "," << opt_str(r.grad) << ","
                  << (r.fd ? format_double(r.fd->finite_difference) : "") << ","
                  << (r.fd ? (r.fd->agrees ? "1" : "0") : "") << "," << r.t1 << "," << r.t2 << "," << r.e1 << ","
                  << r.e2 << "\n";
            }
        });
        return int(kOk);
    });
}

int cmd_verify(const std::string& config, const std::vector<double>& mc_points, const Options& opt,
               std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemConfig cfg = load_with_overrides(config, opt);
        const GbmParams p = make_params(cfg);
        const ProfitFunction pf = make_profit(cfg);
        const StoppingSolution sol = solve_with_options(pf, p, cfg, opt);
        bool ok = true;
        auto status = [](bool b) { return b ? "PASS" : "FAIL"; };
        out << "class: " << to_string(sol.problem_class) << "\n";
        print_thresholds(out, sol);

        const SmoothFitReport sf = smooth_fit_check(sol);
        out << status(sf.passed) << " smooth fit: " << sf.message << "\n";
        ok = ok && sf.passed;

        const HjbReport hjb = hjb_residual(sol, verify_grid(sol, opt.grid));
        std::size_t bad = 0;
        for (const HjbPoint& pt : hjb.points) bad += !pt.ok;
        out << status(hjb.passed) << " HJB: " << hjb.points.size() << " points, " << bad
            << " violations, max continuation residual " << format_double(hjb.max_continuation_residual)
            << " (scale " << format_double(hjb.scale) << ")\n";
        for (const HjbPoint& pt : hjb.points)
            if (!pt.ok) out << "  x = " << format_double(pt.x) << ": " << pt.violation << "\n";
        ok = ok && hjb.passed;

        const TransversalityReport tr = transversality_check(sol);
        out << status(tr.passed) << " transversality: " << tr.message << "\n";
        ok = ok && tr.passed;

        if (opt.mc) {
            std::vector<double> xs = mc_points;
            if (xs.empty()) xs.push_back(default_mc_point(sol));
            for (double x : xs) {
                if (!(x > 0.0)) throw BadParametersError("Monte Carlo point must be positive");
                const DominanceReport dom = dominance_check(sol, x, {-0.3, -0.1, 0.1, 0.3}, cfg.mc);
                const double v = sol.value(x);
                const bool consistent = std::fabs(dom.optimal.mean - v) <= 3.0 * dom.optimal.std_error;
                out << status(consistent) << " Monte Carlo at x = " << format_double(x) << ": J = "
                    << format_double(dom.optimal.mean) << " +- " << format_double(dom.optimal.std_error)
                    << ", V = " << format_double(v) << ", t_max = " << format_double(dom.optimal.t_max) << "\n";
                out << status(dom.passed) << " dominance at x = " << format_double(x) << ":";
                for (const DominanceRow& r : dom.rows)
                    out << " " << format_double(r.shift) << ": " << format_double(r.diff_mean) << " +- "
                        << format_double(r.diff_se) << (r.dominated ? "" : " (beats optimal)") << ";";
                out << "\n";
                ok = ok && consistent && dom.passed;
            }
        }
        return int(ok ? kOk : kVerificationFailed);
    });
}

}  // namespace gbmstop::cli
