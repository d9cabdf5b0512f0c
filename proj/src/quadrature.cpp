#include "gbmstop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace gbmstop {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 15-point Kronrod extension of the 7-point Gauss rule.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum Kind { kMain = 0, kRestZero = 1, kRestInf = 2 };

struct Panel {
    double a, b;
    int kind;
    double value, err, resabs;
    bool operator<(const Panel& o) const { return err < o.err; }
};

template <class F>
Panel gk15(const F& f, double a, double b, int kind) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv1[7], fv2[7];
    const double fc = f(kind, c);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::fabs(resk);
    for (int j = 0; j < 3; ++j) {
        const int jt = 2 * j + 1;
        const double dx = h * xgk[jt];
        const double f1 = f(kind, c - dx), f2 = f(kind, c + dx);
        fv1[jt] = f1;
        fv2[jt] = f2;
        resg += wg[j] * (f1 + f2);
        resk += wgk[jt] * (f1 + f2);
        resabs += wgk[jt] * (std::fabs(f1) + std::fabs(f2));
    }
    for (int j = 0; j < 4; ++j) {
        const int jt = 2 * j;
        const double dx = h * xgk[jt];
        const double f1 = f(kind, c - dx), f2 = f(kind, c + dx);
        fv1[jt] = f1;
        fv2[jt] = f2;
        resk += wgk[jt] * (f1 + f2);
        resabs += wgk[jt] * (std::fabs(f1) + std::fabs(f2));
    }
    const double reskh = 0.5 * resk;
    double resasc = wgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
    const double ah = std::fabs(h);
    resasc *= ah;
    resabs *= ah;
    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    if (!std::isfinite(resk) || !std::isfinite(err)) {
        std::ostringstream os;
        os << "non-finite integrand on [" << a << ", " << b << "] (log scale)";
        throw NoConvergenceError(os.str());
    }
    return Panel{a, b, kind, resk * h, err, resabs};
}

struct Piece {
    double a, b;
    int kind;
};

// Globally adaptive GK15 over the given pieces. fixed_value/fixed_err carry analytic
// tail contributions and truncation bounds.
template <class F>
IntegralResult adaptive(const F& f, const std::vector<Piece>& pieces, const QuadConfig& cfg, double fixed_value,
                        double fixed_err) {
    std::priority_queue<Panel> heap;
    std::vector<Panel> done;
    double total = fixed_value, total_err = fixed_err;
    for (const auto& p : pieces) {
        // Long log-scale pieces are pre-split: exponential weights vary too much for one panel.
        const int n = std::max(1, static_cast<int>(std::ceil((p.b - p.a) / 2.0)));
        for (int i = 0; i < n; ++i) {
            const double a = p.a + (p.b - p.a) * i / n;
            const double b = i + 1 == n ? p.b : p.a + (p.b - p.a) * (i + 1) / n;
            Panel q = gk15(f, a, b, p.kind);
            total += q.value;
            total_err += q.err;
            heap.push(q);
        }
    }
    int splits = 0;
    auto tolerance = [&]() { return std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total)); };
    while (total_err > tolerance() && !heap.empty()) {
        Panel top = heap.top();
        heap.pop();
        const double width = top.b - top.a;
        const bool at_floor = top.err <= 50.0 * kEps * top.resabs * (1.0 + 1e-9);
        if (at_floor || width <= 64.0 * kEps * std::max(1.0, std::fabs(top.a))) {
            done.push_back(top);
            continue;
        }
        if (++splits > cfg.max_subdivisions) {
            std::ostringstream os;
            os << "adaptive quadrature exhausted " << cfg.max_subdivisions << " subdivisions (error "
               << total_err << ", target " << tolerance() << ")";
            throw NoConvergenceError(os.str());
        }
        const double m = 0.5 * (top.a + top.b);
        Panel l = gk15(f, top.a, m, top.kind);
        Panel r = gk15(f, m, top.b, top.kind);
        total += l.value + r.value - top.value;
        total_err += l.err + r.err - top.err;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum to drop the drift of the incremental updates.
    double v = fixed_value, e = fixed_err;
    for (const auto& p : done) {
        v += p.value;
        e += p.err;
    }
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().err;
        heap.pop();
    }
    IntegralResult out;
    out.value = v;
    out.error_estimate = e;
    out.convergent = e <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(v));
    return out;
}

std::vector<double> log_knots(const ProfitFunction& pf, double a, double b) {
    std::vector<double> u;
    for (double x : pf.breakpoints()) {
        if (x > a && x < b) u.push_back(std::log(x));
    }
    return u;
}

// Bound of int_U^inf M e^{-k u} (|u|)^L du for L in {0,1}, U >= 0 when L = 1 is not assumed.
double tail_mass(double M, double k, double U, bool with_log) {
    const double e = M * std::exp(-k * U);
    if (!with_log) return e / k;
    return e * (std::fabs(U) / k + 1.0 / (k * k));
}

IntegralResult weighted_impl(const ProfitFunction& pf, double d, double a, double b, const QuadConfig& cfg,
                             bool with_log) {
    if (a == b) return {};
    if (a > b) {
        IntegralResult r = weighted_impl(pf, d, b, a, cfg, with_log);
        r.value = -r.value;
        return r;
    }
    if (!(a >= 0.0)) throw BadParametersError("integration bounds must be nonnegative");
    const bool left_improper = a == 0.0;
    const bool right_improper = std::isinf(b);
    const Tail& t0 = pf.tail_at_zero();
    const Tail& ti = pf.tail_at_infinity();
    if (left_improper && !converges_at_zero(pf, d)) {
        std::ostringstream os;
        os << "integral of s^(" << -d - 1 << ") Pi diverges at 0 (tail exponent " << t0.exponent << ")";
        throw DivergentError(with_log ? -t0.sign() : t0.sign(), os.str());
    }
    if (right_improper && !converges_at_infinity(pf, d)) {
        std::ostringstream os;
        os << "integral of s^(" << -d - 1 << ") Pi diverges at infinity (tail exponent " << ti.exponent << ")";
        throw DivergentError(ti.sign(), os.str());
    }

    auto f = [&pf, d, with_log](int kind, double u) -> double {
        const double s = std::exp(u);
        const double p = kind == kMain ? pf.eval(s) : (kind == kRestZero ? pf.rest_at_zero(s) : pf.rest_at_infinity(s));
        if (p == 0.0) return 0.0;
        const double w = std::exp(-d * u) * p;
        return with_log ? w * u : w;
    };

    std::vector<double> pts;
    if (!left_improper) pts.push_back(std::log(a));
    for (double u : log_knots(pf, a, b)) pts.push_back(u);
    if (!right_improper) pts.push_back(std::log(b));
    if (pts.empty()) pts.push_back(0.0);

    std::vector<Piece> pieces;
    double fixed = 0.0, fixed_err = 0.0;
    const double target = 1e-3 * cfg.abs_tol;

    if (left_improper && !t0.zero) {
        const double uT = pts.front();
        const double k = t0.exponent - d;
        const double eu = std::exp(k * uT);
        fixed += with_log ? t0.coeff * eu * (uT / k - 1.0 / (k * k)) : t0.coeff * eu / k;
        if (t0.rest_bound > 0.0) {
            const double kr = t0.rest_exponent - d;
            double U = std::min(uT, std::log(t0.rest_from));
            // Mirror of the infinity tail: substitute u -> -u.
            while (tail_mass(t0.rest_bound, kr, -U, with_log) > target) U -= 1.0 + 0.25 * std::fabs(U);
            fixed_err += tail_mass(t0.rest_bound, kr, -U, with_log);
            if (U < uT) pieces.push_back({U, uT, kRestZero});
        }
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) pieces.push_back({pts[i], pts[i + 1], kMain});
    if (right_improper && !ti.zero) {
        const double uR = pts.back();
        const double k = d - ti.exponent;
        const double eu = std::exp(-k * uR);
        fixed += with_log ? ti.coeff * eu * (uR / k + 1.0 / (k * k)) : ti.coeff * eu / k;
        if (ti.rest_bound > 0.0) {
            const double kr = d - ti.rest_exponent;
            double U = std::max(uR, std::log(ti.rest_from));
            while (tail_mass(ti.rest_bound, kr, U, with_log) > target) U += 1.0 + 0.25 * std::fabs(U);
            fixed_err += tail_mass(ti.rest_bound, kr, U, with_log);
            if (U > uR) pieces.push_back({uR, U, kRestInf});
        }
    }
    return adaptive(f, pieces, cfg, fixed, fixed_err);
}

template <class W>
IntegralResult kernel_impl(const ProfitFunction& pf, double x_star, double x, const QuadConfig& cfg, const W& weight) {
    if (!(x_star > 0.0) || !(x > 0.0)) throw BadParametersError("kernel integral needs positive endpoints");
    if (x == x_star) return {};
    const double lo = std::min(x, x_star), hi = std::max(x, x_star);
    const double lx = std::log(x);
    auto f = [&pf, &weight, lx](int, double u) -> double {
        const double p = pf.eval(std::exp(u));
        if (p == 0.0) return 0.0;
        return weight(lx - u) * p;
    };
    std::vector<double> pts{std::log(lo)};
    for (double u : log_knots(pf, lo, hi)) pts.push_back(u);
    pts.push_back(std::log(hi));
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) pieces.push_back({pts[i], pts[i + 1], kMain});
    IntegralResult r = adaptive(f, pieces, cfg, 0.0, 0.0);
    if (x < x_star) r.value = -r.value;
    return r;
}

}  // namespace

bool converges_at_zero(const ProfitFunction& pf, double d) {
    const Tail& t = pf.tail_at_zero();
    return t.zero || t.exponent - d > 0.0;
}

bool converges_at_infinity(const ProfitFunction& pf, double d) {
    const Tail& t = pf.tail_at_infinity();
    return t.zero || t.exponent - d < 0.0;
}

IntegralResult weighted_integral(const ProfitFunction& pf, double d, double a, double b, const QuadConfig& cfg) {
    return weighted_impl(pf, d, a, b, cfg, false);
}

IntegralResult log_weighted_integral(const ProfitFunction& pf, double d, double a, double b, const QuadConfig& cfg) {
    return weighted_impl(pf, d, a, b, cfg, true);
}

IntegralResult kernel_integral(const ProfitFunction& pf, const Roots& roots, double x_star, double x,
                               const QuadConfig& cfg) {
    const double d1 = roots.d1, gap = roots.d2 - roots.d1;
    return kernel_impl(pf, x_star, x, cfg,
                       [d1, gap](double w) { return std::exp(d1 * w) * std::expm1(gap * w); });
}

IntegralResult kernel_derivative_integral(const ProfitFunction& pf, const Roots& roots, double x_star, double x,
                                          const QuadConfig& cfg) {
    const double d1 = roots.d1, d2 = roots.d2, gap = roots.d2 - roots.d1;
    return kernel_impl(pf, x_star, x, cfg, [d1, d2, gap](double w) {
        return std::exp(d1 * w) * (d2 * std::expm1(gap * w) + gap);
    });
}

}  // namespace gbmstop
