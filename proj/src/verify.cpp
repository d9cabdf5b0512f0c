#include "gbmstop/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <sstream>
#include <thread>
#include <tuple>

namespace gbmstop {

namespace {

double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

double W(const ProfitFunction& pf, double d, double a, double b, const QuadConfig& cfg) {
    return weighted_integral(pf, d, a, b, cfg).value;
}

double pw(double x, double d) { return std::exp(d * std::log(x)); }

std::vector<double> finite_thresholds(const StoppingSolution& sol) {
    std::vector<double> t;
    for (const auto& v : {sol.gamma, sol.zeta, sol.delta, sol.beta})
        if (v && *v > 0.0 && std::isfinite(*v)) t.push_back(*v);
    return t;
}

bool value_is_infinite(const StoppingSolution& sol) {
    return sol.problem_class == ProblemClass::TrivialNeverStop && std::isinf(sol.value(1.0));
}

// V(y) = sum_i w_i y^d_i (C_i + sign_i int_x^y s^(-d_i-1) Pi ds) around a fixed x.
struct Term {
    double w;
    double d;
    double C;
    double sign;
};

std::vector<Term> decomposition(const StoppingSolution& sol, double x) {
    const ProfitFunction& pf = sol.profit();
    const GbmParams& p = sol.params();
    const QuadConfig& cfg = sol.quad_config();
    const Roots& rt = p.roots();
    const double k = 2.0 / (p.sigma2() * (rt.d2 - rt.d1));
    if (const auto a = sol.anchor_for(x))
        return {{-k, rt.d2, W(pf, rt.d2, *a, x, cfg), 1.0}, {k, rt.d1, W(pf, rt.d1, *a, x, cfg), 1.0}};
    return {{k, rt.d1, W(pf, rt.d1, 0.0, x, cfg), 1.0}, {k, rt.d2, W(pf, rt.d2, x, kInf, cfg), -1.0}};
}

struct Derivs {
    double v1;
    double v2;
};

Derivs differences(const StoppingSolution& sol, const std::vector<Term>& terms, double x, double h) {
    const ProfitFunction& pf = sol.profit();
    const QuadConfig& cfg = sol.quad_config();
    double D1 = 0.0, D2 = 0.0;
    for (const Term& t : terms) {
        const double xd = pw(x, t.d);
        const double ep = xd * std::expm1(t.d * std::log1p(h / x));
        const double em = xd * std::expm1(t.d * std::log1p(-h / x));
        const double ip = pw(x + h, t.d) * W(pf, t.d, x, x + h, cfg);
        const double im = pw(x - h, t.d) * W(pf, t.d, x, x - h, cfg);
        D1 += t.w * ((ep - em) * t.C + t.sign * (ip - im));
        D2 += t.w * ((ep + em) * t.C + t.sign * (ip + im));
    }
    return {D1 / (2.0 * h), D2 / (h * h)};
}

double residual_of(const GbmParams& p, double x, double v, const Derivs& d, double pi) {
    return -(p.sigma2() / 2.0) * x * x * d.v2 - p.alpha() * x * d.v1 + p.r() * v - pi;
}

// Threshold policies become "stop if X <= lo or X >= hi"; anything else falls back to contains().
struct Policy {
    double lo = 0.0;
    double hi = kInf;
    const IntervalUnion* generic = nullptr;
    bool stops(double x) const { return generic ? generic->contains(x) : (x <= lo || x >= hi); }
};

Policy make_policy(const IntervalUnion& u) {
    Policy pol;
    for (const Interval& iv : u.parts) {
        if (iv.lo <= 0.0)
            pol.lo = std::max(pol.lo, iv.hi);
        else if (std::isinf(iv.hi))
            pol.hi = std::min(pol.hi, iv.lo);
        else
            pol.generic = &u;
    }
    return pol;
}

struct Accum {
    double sum = 0.0, sum2 = 0.0, dsum = 0.0, dsum2 = 0.0;
    std::int64_t stopped = 0;
    std::int64_t alive_at_end = 0;
};

// Per-path stepping shared by the policy simulator and simulate_terminal.
struct Stepper {
    double mu, sd, decay;
    Stepper(const GbmParams& p, double dt)
        : mu((p.alpha() - p.sigma2() / 2.0) * dt), sd(std::sqrt(p.sigma2() * dt)), decay(std::exp(-p.r() * dt)) {}
};

std::int64_t step_count(double t_max, double dt) {
    return static_cast<std::int64_t>(std::ceil(t_max / dt - 1e-9));
}

template <class Body>
void for_each_path_parallel(std::int64_t n_paths, int workers, Body body) {
    unsigned w = workers > 0 ? unsigned(workers) : std::max(1u, std::thread::hardware_concurrency());
    w = unsigned(std::min<std::int64_t>(w, std::max<std::int64_t>(n_paths, 1)));
    if (w <= 1) {
        body(0, n_paths);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n_paths + w - 1) / w;
    for (unsigned i = 0; i < w; ++i) {
        const std::int64_t lo = i * chunk, hi = std::min(n_paths, lo + chunk);
        if (lo < hi) pool.emplace_back(body, lo, hi);
    }
    for (auto& t : pool) t.join();
}

// Each path writes its own slots; the reduction runs in path order so the sums do not depend
// on the number of workers.
std::vector<Accum> simulate(const ProfitFunction& pf, const GbmParams& p, const std::vector<Policy>& pols, double x,
                            double dt, double t_max, std::int64_t n_paths, std::uint64_t seed, int workers) {
    const std::size_t m = pols.size();
    const std::int64_t n_steps = step_count(t_max, dt);
    const Stepper st(p, dt);
    std::vector<double> J(static_cast<std::size_t>(n_paths) * m);
    std::vector<signed char> state(J.size());  // 0 alive at t_max, 1 stopped
    auto run = [&](std::int64_t lo, std::int64_t hi) {
        std::vector<char> alive(m);
        for (std::int64_t path = lo; path < hi; ++path) {
            std::mt19937_64 gen(stream_seed(seed, static_cast<std::uint64_t>(path)));
            boost::random::normal_distribution<double> normal;
            double* Jp = &J[static_cast<std::size_t>(path) * m];
            std::size_t n_alive = 0;
            for (std::size_t k = 0; k < m; ++k) {
                alive[k] = !pols[k].stops(x);
                n_alive += alive[k];
            }
            double y = std::log(x), disc = 1.0, f0 = pf.eval(x);
            for (std::int64_t i = 0; i < n_steps && n_alive > 0; ++i) {
                y += st.mu + st.sd * normal(gen);
                const double X = std::exp(y);
                disc *= st.decay;
                const double f1 = disc * pf.eval(X);
                const double inc = 0.5 * dt * (f0 + f1);
                for (std::size_t k = 0; k < m; ++k) {
                    if (!alive[k]) continue;
                    Jp[k] += inc;
                    if (pols[k].stops(X)) {
                        alive[k] = 0;
                        --n_alive;
                    }
                }
                f0 = f1;
            }
            for (std::size_t k = 0; k < m; ++k) state[static_cast<std::size_t>(path) * m + k] = !alive[k];
        }
    };
    for_each_path_parallel(n_paths, workers, run);

    std::vector<Accum> acc(m);
    for (std::int64_t path = 0; path < n_paths; ++path) {
        const double* Jp = &J[static_cast<std::size_t>(path) * m];
        for (std::size_t k = 0; k < m; ++k) {
            acc[k].sum += Jp[k];
            acc[k].sum2 += Jp[k] * Jp[k];
            const double d = Jp[k] - Jp[0];
            acc[k].dsum += d;
            acc[k].dsum2 += d * d;
            if (state[static_cast<std::size_t>(path) * m + k])
                ++acc[k].stopped;
            else
                ++acc[k].alive_at_end;
        }
    }
    return acc;
}

std::pair<double, double> mean_se(double sum, double sum2, std::int64_t n) {
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = n > 1 ? std::max(0.0, (sum2 - nn * mean * mean) / (nn - 1.0)) : 0.0;
    return {mean, std::sqrt(var / nn)};
}

// Smallest t with f(t) <= target for decreasing f.
double solve_decreasing(const std::function<double(double)>& f, double target) {
    if (f(0.0) <= target) return 0.0;
    double hi = 1.0;
    while (f(hi) > target) {
        hi *= 2.0;
        if (hi > 1e9) throw TruncationDominatesError("envelope does not decay to the requested level");
    }
    double lo = hi / 2.0;
    if (hi == 1.0) lo = 0.0;
    for (int i = 0; i < 100 && hi - lo > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

// Pilot run to t where the envelope is 1% of its start, then t_max where it drops to a tenth
// of the standard error expected from n_paths.
double choose_t_max(const ProfitFunction& pf, const GbmParams& params, const std::vector<Policy>& pols, double x,
                    const McConfig& mc) {
    if (mc.t_max) return *mc.t_max;
    auto bound = [&](double t) { return truncation_envelope(pf, params, x, t); };
    const double b0 = bound(0.0);
    if (std::isinf(b0)) throw TruncationDominatesError("profit envelope has a growing moment; give t_max explicitly");
    const double t_pilot = solve_decreasing(bound, 0.01 * b0);
    const std::int64_t n_pilot = std::min<std::int64_t>(mc.n_paths, 1000);
    const auto pilot = simulate(pf, params, pols, x, mc.dt, t_pilot, n_pilot, splitmix64(mc.seed), mc.workers);
    double sd = 0.0;
    for (const Accum& a : pilot)
        sd = std::max(sd, mean_se(a.sum, a.sum2, n_pilot).second * std::sqrt(double(n_pilot)));
    const double target = sd > 0.0 ? 0.1 * sd / std::sqrt(double(mc.n_paths)) : 1e-12 * b0;
    return solve_decreasing(bound, target);
}

}  // namespace

double solution_scale(const StoppingSolution& sol) {
    const std::vector<double> t = finite_thresholds(sol);
    double lo = 0.1, hi = 10.0;
    if (!t.empty()) {
        lo = *std::min_element(t.begin(), t.end()) / 10.0;
        hi = *std::max_element(t.begin(), t.end()) * 10.0;
    }
    return std::max(1.0, sol.profit().sup_abs(lo, hi));
}

double truncated_moment(const GbmParams& params, double x, const TruncatedMomentSpec& spec) {
    const Roots& rt = params.roots();
    const double s = std::sqrt(params.sigma2()), st = std::sqrt(spec.t);
    const double shift = s * ((rt.d1 + rt.d2) / 2.0 - spec.beta) * st;
    // z(c) with H(t;c) = Phi(z(c)); c = 0 and c = inf give -inf and +inf.
    auto z = [&](double c) {
        if (c <= 0.0) return -kInf;
        if (std::isinf(c)) return kInf;
        return std::log(c / x) / (s * st) + shift;
    };
    double mass = 0.0;
    switch (spec.region) {
    case RegionKind::Above: mass = Phi(-z(spec.a)); break;
    case RegionKind::Below: mass = Phi(z(spec.b)); break;
    case RegionKind::Between: {
        const double za = z(spec.a), zb = z(spec.b);
        mass = za > 0.0 ? Phi(-za) - Phi(-zb) : Phi(zb) - Phi(za);
        break;
    }
    }
    if (mass <= 0.0) return 0.0;
    return std::exp(spec.beta * std::log(x) + char_poly(params, spec.beta) * spec.t) * mass;
}

McEstimate mc_truncated_moment(const GbmParams& params, double x, const TruncatedMomentSpec& spec,
                               std::int64_t n_paths, std::uint64_t seed) {
    std::mt19937_64 gen(stream_seed(seed, 0));
    boost::random::normal_distribution<double> normal;
    const double s = std::sqrt(params.sigma2() * spec.t);
    const double drift = (params.alpha() - params.sigma2() / 2.0) * spec.t;
    const double disc = std::exp(-params.r() * spec.t);
    double sum = 0.0, sum2 = 0.0;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n_paths; ++i) {
        const double ly = std::log(x) + drift + s * normal(gen);
        const double X = std::exp(ly);
        bool in = false;
        switch (spec.region) {
        case RegionKind::Above: in = X > spec.a; break;
        case RegionKind::Below: in = X < spec.b; break;
        case RegionKind::Between: in = X > spec.a && X < spec.b; break;
        }
        if (!in) continue;
        ++hits;
        const double v = disc * std::exp(spec.beta * ly);
        sum += v;
        sum2 += v * v;
    }
    McEstimate e;
    std::tie(e.mean, e.std_error) = mean_se(sum, sum2, n_paths);
    e.t_max = spec.t;
    e.n_stopped = hits;
    return e;
}

std::vector<double> moment_decay(const GbmParams& params, double x, TruncatedMomentSpec spec,
                                 const std::vector<double>& times) {
    std::vector<double> out;
    for (double t : times) {
        spec.t = t;
        out.push_back(truncated_moment(params, x, spec));
    }
    return out;
}

TransversalityReport transversality_check(const StoppingSolution& sol) {
    TransversalityReport rep;
    const GbmParams& p = sol.params();
    const Roots& rt = p.roots();
    const double mid = (rt.d1 + rt.d2) / 2.0;
    const std::vector<double> times{10.0, 50.0, 250.0};
    auto strictly_decaying = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1])) return false;
        return !v.empty() && v.front() > 0.0;
    };

    if (sol.problem_class == ProblemClass::TrivialStopNow) {
        rep.passed = true;
        rep.message = "V = 0";
        return rep;
    }
    if (value_is_infinite(sol)) {
        rep.message = "V is infinite";
        return rep;
    }
    const auto& parts = sol.continuation_region.parts;
    if (parts.empty()) {
        rep.passed = true;
        rep.message = "empty continuation region";
        return rep;
    }
    const bool up = std::isinf(parts.back().hi);
    const bool down = parts.front().lo <= 0.0;
    std::ostringstream msg;
    rep.passed = true;

    if (!up && !down) {
        const double a = parts.front().lo, b = parts.front().hi;
        rep.envelope_beta = 0.0;
        rep.decay = moment_decay(p, std::sqrt(a * b), {0.0, RegionKind::Between, a, b, 1.0}, times);
        rep.passed = strictly_decaying(rep.decay);
        msg << "bounded continuation region; occupation moment " << (rep.passed ? "decays" : "does not decay");
        rep.message = msg.str();
        return rep;
    }

    // One geometric grid per unbounded end; d = d2 toward infinity, d1 toward zero.
    auto side = [&](bool toward_inf) {
        const double d = toward_inf ? rt.d2 : rt.d1;
        double base = 1.0;
        if (toward_inf && parts.back().lo > 0.0) base = parts.back().lo;
        if (!toward_inf && std::isfinite(parts.front().hi)) base = parts.front().hi;
        const double f = toward_inf ? 10.0 : 0.1;
        std::vector<std::pair<double, double>> ratios;
        double x = base;
        for (int k = 1; k <= 6; ++k) {
            x *= f;
            ratios.emplace_back(x, sol.value(x) / pw(x, d));
        }
        bool ok = true;
        for (std::size_t i = 1; i < ratios.size(); ++i)
            if (!(std::fabs(ratios[i].second) < std::fabs(ratios[i - 1].second))) ok = false;
        const auto& [x5, r5] = ratios[4];
        const auto& [x6, r6] = ratios[5];
        const double v5 = std::fabs(r5 * pw(x5, d)), v6 = std::fabs(r6 * pw(x6, d));
        double fitted = v5 > 0.0 && v6 > 0.0 ? std::log(v6 / v5) / std::log(x6 / x5) : mid;
        double env;
        if (toward_inf) {
            if (!(fitted < d)) ok = false;
            env = fitted <= mid ? mid : 0.5 * (fitted + d);
        } else {
            if (!(fitted > d)) ok = false;
            env = fitted >= mid ? mid : 0.5 * (fitted + d);
        }
        TruncatedMomentSpec spec{env, toward_inf ? RegionKind::Above : RegionKind::Below, base, base, 1.0};
        const std::vector<double> decay = moment_decay(p, toward_inf ? 2.0 * base : 0.5 * base, spec, times);
        if (!strictly_decaying(decay)) ok = false;
        msg << (toward_inf ? "at infinity" : "at zero") << ": V/x^d " << (ok ? "-> 0" : "does not vanish")
            << ", fitted exponent " << fitted << ", envelope " << env << "; ";
        rep.ratios.insert(rep.ratios.end(), ratios.begin(), ratios.end());
        rep.fitted_beta = fitted;
        rep.envelope_beta = env;
        rep.decay.insert(rep.decay.end(), decay.begin(), decay.end());
        rep.passed = rep.passed && ok;
    };
    if (up) side(true);
    if (down) side(false);
    rep.message = msg.str();
    return rep;
}

SmoothFitReport smooth_fit_check(const StoppingSolution& sol, double tol) {
    SmoothFitReport rep;
    rep.scale = solution_scale(sol);
    const ProfitFunction& pf = sol.profit();
    const GbmParams& p = sol.params();
    const QuadConfig& cfg = sol.quad_config();
    const Roots& rt = p.roots();
    const double k = 2.0 / p.sigma2();
    auto lower = [&](double g) {
        rep.at = g;
        rep.value_gap = std::fabs(sol.value(g));
        rep.derivative_gap = k * pw(g, rt.d2 - 1.0) * std::fabs(W(pf, rt.d2, g, kInf, cfg));
    };
    auto upper = [&](double z) {
        rep.at = z;
        rep.value_gap = std::fabs(sol.value(z));
        rep.derivative_gap = k * pw(z, rt.d1 - 1.0) * std::fabs(W(pf, rt.d1, 0.0, z, cfg));
    };
    switch (sol.problem_class) {
    case ProblemClass::OneSidedLower: lower(*sol.gamma); break;
    case ProblemClass::OneSidedUpper: upper(*sol.zeta); break;
    case ProblemClass::TwoSided: {
        const double d = *sol.delta, b = *sol.beta;
        if (d <= 0.0) {
            upper(b);
        } else if (std::isinf(b)) {
            lower(d);
        } else {
            const double xm = *sol.switch_point();
            const double c = -2.0 / (p.sigma2() * (rt.d2 - rt.d1));
            const double vd = c * kernel_integral(pf, rt, d, xm, cfg).value;
            const double vb = c * kernel_integral(pf, rt, b, xm, cfg).value;
            const double dd = c / xm * kernel_derivative_integral(pf, rt, d, xm, cfg).value;
            const double db = c / xm * kernel_derivative_integral(pf, rt, b, xm, cfg).value;
            rep.at = xm;
            rep.value_gap = std::fabs(vd - vb);
            rep.derivative_gap = std::fabs(dd - db);
        }
        break;
    }
    default:
        rep.passed = true;
        rep.message = std::string("no free boundary for class ") + to_string(sol.problem_class);
        return rep;
    }
    rep.passed = rep.value_gap <= tol * rep.scale && rep.derivative_gap <= tol * rep.scale;
    std::ostringstream msg;
    msg << "value gap " << rep.value_gap << ", derivative gap " << rep.derivative_gap << " at " << rep.at
        << " (tolerance " << tol * rep.scale << ")";
    rep.message = msg.str();
    return rep;
}

HjbReport hjb_residual(const StoppingSolution& sol, const std::vector<double>& grid, double tol) {
    HjbReport rep;
    rep.scale = solution_scale(sol);
    const GbmParams& p = sol.params();
    const bool infinite = value_is_infinite(sol);
    rep.passed = !infinite;
    for (double x : grid) {
        HjbPoint pt;
        pt.x = x;
        const double pi = sol.profit().eval(x);
        if (infinite) {
            pt.violation = "V is infinite";
        } else if (sol.in_stopping_region(x)) {
            pt.value = sol.value(x);
            pt.residual = -pi;
            pt.ok = pt.value == 0.0 && pt.residual >= 0.0;
            if (!pt.ok) pt.violation = "Pi > 0 in the stopping region";
        } else {
            pt.in_continuation = true;
            const std::vector<Term> terms = decomposition(sol, x);
            for (const Term& t : terms) pt.value += t.w * pw(x, t.d) * t.C;
            const double h = std::max(1e-5 * x, 1e-7);
            const Derivs a = differences(sol, terms, x, h);
            const Derivs b = differences(sol, terms, x, h / 2.0);
            pt.d1v = (4.0 * b.v1 - a.v1) / 3.0;
            pt.d2v = (4.0 * b.v2 - a.v2) / 3.0;
            pt.residual = residual_of(p, x, pt.value, {pt.d1v, pt.d2v}, pi);
            pt.richardson_gap = std::fabs(residual_of(p, x, pt.value, a, pi) - residual_of(p, x, pt.value, b, pi));
            const double size = std::max({rep.scale, std::fabs(p.sigma2() / 2.0 * x * x * pt.d2v),
                                          std::fabs(p.alpha() * x * pt.d1v), std::fabs(p.r() * pt.value)});
            const bool eq = std::fabs(pt.residual) <= tol * size;
            const bool nonneg = pt.value >= -1e-10 * rep.scale;
            pt.ok = eq && nonneg;
            if (!eq) pt.violation = "continuation residual above tolerance";
            else if (!nonneg) pt.violation = "V < 0 in the continuation region";
            rep.max_continuation_residual = std::max(rep.max_continuation_residual, std::fabs(pt.residual));
        }
        rep.passed = rep.passed && pt.ok;
        rep.points.push_back(std::move(pt));
    }
    return rep;
}

double truncation_envelope(const ProfitFunction& pf, const GbmParams& params, double x, double t) {
    std::vector<double> exps{0.0};
    const Tail& t0 = pf.tail_at_zero();
    const Tail& ti = pf.tail_at_infinity();
    if (!t0.zero && t0.exponent < 0.0) exps.push_back(t0.exponent);
    if (!ti.zero && ti.exponent > 0.0) exps.push_back(ti.exponent);
    auto env = [&](double y) {
        double s = 0.0;
        for (double e : exps) s += pw(y, e);
        return s;
    };
    std::vector<double> ys(pf.breakpoints());
    for (int i = 0; i <= 1600; ++i) ys.push_back(std::pow(10.0, -8.0 + i * 0.01));
    double M = 0.0;
    for (double y : ys) M = std::max(M, std::fabs(pf.eval(y)) / env(y));
    double bound = 0.0;
    for (double e : exps) {
        const double P = char_poly(params, e);
        if (P >= 0.0) return kInf;
        bound += M * std::exp(e * std::log(x) + P * t) / -P;
    }
    return bound;
}

McComparison estimate_J_common(const ProfitFunction& pf, const GbmParams& params,
                               const std::vector<IntervalUnion>& stopping_regions, double x, const McConfig& mc) {
    if (stopping_regions.empty()) throw BadParametersError("no policies to estimate");
    if (!(mc.dt > 0.0) || mc.n_paths < 2) throw BadParametersError("dt must be positive and n_paths >= 2");
    std::vector<Policy> pols;
    for (const auto& u : stopping_regions) pols.push_back(make_policy(u));
    auto bound = [&](double t) { return truncation_envelope(pf, params, x, t); };
    const bool unbounded = std::isinf(bound(0.0));
    const double t_max = choose_t_max(pf, params, pols, x, mc);
    const auto acc = simulate(pf, params, pols, x, mc.dt, t_max, mc.n_paths, mc.seed, mc.workers);
    McComparison out;
    for (const Accum& a : acc) {
        McEstimate e;
        std::tie(e.mean, e.std_error) = mean_se(a.sum, a.sum2, mc.n_paths);
        e.t_max = t_max;
        e.n_stopped = a.stopped;
        e.truncation_bound = a.alive_at_end > 0 ? bound(t_max) : 0.0;
        if (!(mc.t_max && unbounded) && e.truncation_bound > e.std_error) {
            std::ostringstream msg;
            msg << "truncation bound " << e.truncation_bound << " exceeds standard error " << e.std_error
                << " at t_max " << t_max;
            throw TruncationDominatesError(msg.str());
        }
        out.estimates.push_back(e);
        const auto [dm, dse] = mean_se(a.dsum, a.dsum2, mc.n_paths);
        out.diff_mean.push_back(dm);
        out.diff_se.push_back(dse);
    }
    return out;
}

std::vector<double> simulate_terminal(const GbmParams& params, double x, double t, double dt, std::int64_t n_paths,
                                      std::uint64_t seed) {
    const Stepper st(params, dt);
    const std::int64_t n_steps = step_count(t, dt);
    std::vector<double> out(static_cast<std::size_t>(n_paths));
    for (std::int64_t path = 0; path < n_paths; ++path) {
        std::mt19937_64 gen(stream_seed(seed, static_cast<std::uint64_t>(path)));
        boost::random::normal_distribution<double> normal;
        double y = std::log(x);
        for (std::int64_t i = 0; i < n_steps; ++i) y += st.mu + st.sd * normal(gen);
        out[static_cast<std::size_t>(path)] = std::exp(y);
    }
    return out;
}

McEstimate estimate_J(const ProfitFunction& pf, const GbmParams& params, const IntervalUnion& stopping_region,
                      double x, const McConfig& mc) {
    return estimate_J_common(pf, params, {stopping_region}, x, mc).estimates.front();
}

IntervalUnion shifted_region(const StoppingSolution& sol, double factor) {
    IntervalUnion u;
    switch (sol.problem_class) {
    case ProblemClass::OneSidedLower: u.parts.push_back({0.0, *sol.gamma * factor, false, true}); break;
    case ProblemClass::OneSidedUpper: u.parts.push_back({*sol.zeta * factor, kInf, true, false}); break;
    case ProblemClass::TwoSided:
        if (*sol.delta > 0.0) u.parts.push_back({0.0, *sol.delta * factor, false, true});
        if (std::isfinite(*sol.beta)) u.parts.push_back({*sol.beta * factor, kInf, true, false});
        break;
    default: return sol.stopping_region;
    }
    return u;
}

DtHalvingReport dt_halving_check(const ProfitFunction& pf, const GbmParams& params,
                                 const IntervalUnion& stopping_region, double x, const McConfig& mc) {
    if (!(mc.dt > 0.0) || mc.n_paths < 2) throw BadParametersError("dt must be positive and n_paths >= 2");
    const Policy pol = make_policy(stopping_region);
    const double t_max = choose_t_max(pf, params, {pol}, x, mc);
    const std::int64_t n_steps = step_count(t_max, mc.dt);
    const Stepper fine(params, mc.dt / 2.0);
    const double mu_c = 2.0 * fine.mu;
    std::vector<double> Jc(static_cast<std::size_t>(mc.n_paths)), Jf(Jc.size());
    auto run = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t path = lo; path < hi; ++path) {
            std::mt19937_64 gen(stream_seed(mc.seed, static_cast<std::uint64_t>(path)));
            boost::random::normal_distribution<double> normal;
            bool alive_c = !pol.stops(x), alive_f = alive_c;
            double yc = std::log(x), yf = yc, disc = 1.0;
            double fc0 = pf.eval(x), ff0 = fc0, jc = 0.0, jf = 0.0;
            for (std::int64_t i = 0; i < n_steps && (alive_c || alive_f); ++i) {
                const double z1 = normal(gen), z2 = normal(gen);
                // Fine path: two half steps. Coarse path: their sum.
                for (double z : {z1, z2}) {
                    yf += fine.mu + fine.sd * z;
                    disc *= fine.decay;
                    const double Xf = std::exp(yf);
                    const double ff1 = disc * pf.eval(Xf);
                    if (alive_f) {
                        jf += 0.25 * mc.dt * (ff0 + ff1);
                        if (pol.stops(Xf)) alive_f = false;
                    }
                    ff0 = ff1;
                }
                yc += mu_c + fine.sd * (z1 + z2);
                const double Xc = std::exp(yc);
                const double fc1 = disc * pf.eval(Xc);
                if (alive_c) {
                    jc += 0.5 * mc.dt * (fc0 + fc1);
                    if (pol.stops(Xc)) alive_c = false;
                }
                fc0 = fc1;
            }
            Jc[static_cast<std::size_t>(path)] = jc;
            Jf[static_cast<std::size_t>(path)] = jf;
        }
    };
    for_each_path_parallel(mc.n_paths, mc.workers, run);
    double sc = 0, sc2 = 0, sf = 0, sf2 = 0, sd = 0, sd2 = 0;
    for (std::size_t i = 0; i < Jc.size(); ++i) {
        sc += Jc[i];
        sc2 += Jc[i] * Jc[i];
        sf += Jf[i];
        sf2 += Jf[i] * Jf[i];
        const double d = Jf[i] - Jc[i];
        sd += d;
        sd2 += d * d;
    }
    DtHalvingReport rep;
    std::tie(rep.coarse.mean, rep.coarse.std_error) = mean_se(sc, sc2, mc.n_paths);
    std::tie(rep.fine.mean, rep.fine.std_error) = mean_se(sf, sf2, mc.n_paths);
    rep.coarse.t_max = rep.fine.t_max = t_max;
    std::tie(rep.diff_mean, rep.diff_se) = mean_se(sd, sd2, mc.n_paths);
    rep.within_one_se = std::fabs(rep.diff_mean) < rep.coarse.std_error;
    return rep;
}

DominanceReport dominance_check(const StoppingSolution& sol, double x, const std::vector<double>& shifts,
                                const McConfig& mc) {
    std::vector<IntervalUnion> regions{sol.stopping_region};
    for (double s : shifts) regions.push_back(shifted_region(sol, 1.0 + s));
    const McComparison cmp = estimate_J_common(sol.profit(), sol.params(), regions, x, mc);
    DominanceReport rep;
    rep.passed = true;
    rep.optimal = cmp.estimates.front();
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        DominanceRow row;
        row.shift = shifts[i];
        row.estimate = cmp.estimates[i + 1];
        row.diff_mean = cmp.diff_mean[i + 1];
        row.diff_se = cmp.diff_se[i + 1];
        row.dominated = row.diff_mean <= 2.0 * row.diff_se;
        rep.passed = rep.passed && row.dominated;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace gbmstop
