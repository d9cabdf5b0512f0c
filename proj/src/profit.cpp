#include "gbmstop/profit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gbmstop {

namespace {

double horner(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<double> trimmed(std::vector<double> c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return c;
}

double eval_form(const SegmentForm& form, double x) {
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                const double h = horner(f.coeffs, x);
                return f.lowest_power == 0 ? h : h * std::pow(x, f.lowest_power);
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                return f.e / (x - f.f) + f.K;
            } else if constexpr (std::is_same_v<T, Power>) {
                return f.c * std::pow(x, f.p);
            } else {
                return f.k;
            }
        },
        form);
}

double derivative_form(const SegmentForm& form, double x) {
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                double acc = 0.0;
                for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
                    const int n = f.lowest_power + static_cast<int>(k);
                    if (n != 0) acc += f.coeffs[k] * n * std::pow(x, n - 1);
                }
                return acc;
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                const double u = x - f.f;
                return -f.e / (u * u);
            } else if constexpr (std::is_same_v<T, Power>) {
                return f.c * f.p * std::pow(x, f.p - 1.0);
            } else {
                return 0.0;
            }
        },
        form);
}

bool form_is_zero(const SegmentForm& form) {
    return std::visit(
        [](const auto& f) -> bool {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                return trimmed(f.coeffs).empty();
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                return f.e == 0.0 && f.K == 0.0;
            } else if constexpr (std::is_same_v<T, Power>) {
                return f.c == 0.0;
            } else {
                return f.k == 0.0;
            }
        },
        form);
}

std::vector<double> form_roots(const SegmentForm& form, double lo, double hi) {
    return std::visit(
        [lo, hi](const auto& f) -> std::vector<double> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                return polynomial_roots_in(f.coeffs, lo, hi);
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                if (f.e == 0.0 || f.K == 0.0) return {};
                const double x = f.f - f.e / f.K;
                if (x > lo && x < hi) return {x};
                return {};
            } else {
                return {};
            }
        },
        form);
}

Tail tail_at_infinity_of(const Segment& seg) {
    Tail t;
    std::visit(
        [&t, &seg](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                const auto c = trimmed(f.coeffs);
                if (c.empty()) {
                    t.zero = true;
                    return;
                }
                const std::size_t top = c.size() - 1;
                t.coeff = c[top];
                t.exponent = f.lowest_power + static_cast<double>(top);
                for (std::size_t k = 0; k < top; ++k) t.rest_bound += std::fabs(c[k]);
                t.rest_exponent = t.exponent - 1.0;
                t.rest_from = std::max(1.0, seg.lo);
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                t.rest_from = std::max(2.0 * f.f, seg.lo);
                if (f.K != 0.0) {
                    t.coeff = f.K;
                    t.exponent = 0.0;
                    t.rest_bound = 2.0 * std::fabs(f.e);
                    t.rest_exponent = -1.0;
                } else if (f.e != 0.0) {
                    t.coeff = f.e;
                    t.exponent = -1.0;
                    t.rest_bound = 2.0 * std::fabs(f.e) * f.f;
                    t.rest_exponent = -2.0;
                } else {
                    t.zero = true;
                }
            } else if constexpr (std::is_same_v<T, Power>) {
                t.zero = f.c == 0.0;
                t.coeff = f.c;
                t.exponent = f.p;
                t.rest_from = seg.lo;
            } else {
                t.zero = f.k == 0.0;
                t.coeff = f.k;
                t.rest_from = seg.lo;
            }
        },
        seg.form);
    return t;
}

Tail tail_at_zero_of(const Segment& seg) {
    Tail t;
    std::visit(
        [&t, &seg](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                const auto c = trimmed(f.coeffs);
                if (c.empty()) {
                    t.zero = true;
                    return;
                }
                std::size_t low = 0;
                while (c[low] == 0.0) ++low;
                t.coeff = c[low];
                t.exponent = f.lowest_power + static_cast<double>(low);
                for (std::size_t k = low + 1; k < c.size(); ++k) t.rest_bound += std::fabs(c[k]);
                t.rest_exponent = t.exponent + 1.0;
                t.rest_from = std::min(1.0, seg.hi);
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                if (f.e == 0.0) {
                    t.zero = f.K == 0.0;
                    t.coeff = f.K;
                    t.rest_from = seg.hi;
                } else if (f.f == 0.0) {
                    t.coeff = f.e;
                    t.exponent = -1.0;
                    t.rest_bound = std::fabs(f.K);
                    t.rest_exponent = 0.0;
                    t.rest_from = seg.hi;
                } else {
                    const double v0 = f.K - f.e / f.f;
                    t.rest_from = std::min(seg.hi, 0.5 * f.f);
                    if (v0 != 0.0) {
                        t.coeff = v0;
                        t.exponent = 0.0;
                        t.rest_bound = 2.0 * std::fabs(f.e) / (f.f * f.f);
                        t.rest_exponent = 1.0;
                    } else {
                        t.coeff = -f.e / (f.f * f.f);
                        t.exponent = 1.0;
                        t.rest_bound = 2.0 * std::fabs(f.e) / (f.f * f.f * f.f);
                        t.rest_exponent = 2.0;
                    }
                }
            } else if constexpr (std::is_same_v<T, Power>) {
                t.zero = f.c == 0.0;
                t.coeff = f.c;
                t.exponent = f.p;
                t.rest_from = seg.hi;
            } else {
                t.zero = f.k == 0.0;
                t.coeff = f.k;
                t.rest_from = seg.hi;
            }
        },
        seg.form);
    return t;
}

double probe_point(double lo, double hi) {
    if (lo == 0.0) return std::isinf(hi) ? 1.0 : 0.5 * hi;
    if (std::isinf(hi)) return std::max(2.0 * lo, lo + 1.0);
    return std::sqrt(lo) * std::sqrt(hi);
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

void check_segments(const std::vector<Segment>& segs) {
    if (segs.empty()) throw BadParametersError("profit function needs at least one segment");
    if (segs.front().lo != 0.0) throw BadParametersError("first segment must start at 0");
    if (!std::isinf(segs.back().hi)) throw BadParametersError("last segment must extend to infinity");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        std::ostringstream where;
        where << "segment " << i << " [" << s.lo << ", " << s.hi << ")";
        if (!(s.lo < s.hi) || !std::isfinite(s.lo) || s.lo < 0.0) {
            throw BadParametersError(where.str() + ": interval must satisfy 0 <= lo < hi");
        }
        if (i + 1 < segs.size() && segs[i + 1].lo != s.hi) {
            throw BadParametersError(where.str() + ": gap or overlap with the next segment");
        }
        std::visit(
            [&](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Polynomial>) {
                    for (double c : f.coeffs) {
                        if (!std::isfinite(c)) throw BadParametersError(where.str() + ": non-finite coefficient");
                    }
                } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                    if (!std::isfinite(f.e) || !std::isfinite(f.f) || !std::isfinite(f.K) || f.f < 0.0) {
                        throw BadParametersError(where.str() + ": reciprocal needs finite e, K and f >= 0");
                    }
                    const bool left = f.f < s.lo || (f.f == 0.0 && s.lo == 0.0);
                    const bool right = f.f > s.hi;
                    if (!left && !right) {
                        throw BadParametersError(where.str() + ": reciprocal pole lies in the closed segment");
                    }
                } else if constexpr (std::is_same_v<T, Power>) {
                    if (!std::isfinite(f.c) || !std::isfinite(f.p)) {
                        throw BadParametersError(where.str() + ": non-finite power parameters");
                    }
                } else {
                    if (!std::isfinite(f.k)) throw BadParametersError(where.str() + ": non-finite constant");
                }
            },
            s.form);
    }
}

}  // namespace

std::vector<double> polynomial_roots_in(const std::vector<double>& coeffs_in, double lo, double hi) {
    const auto c = trimmed(coeffs_in);
    std::vector<double> out;
    const std::size_t n = c.size();
    if (n <= 1) return out;
    auto keep = [&](double x) {
        if (x > lo && x < hi) out.push_back(x);
    };
    if (n == 2) {
        keep(-c[0] / c[1]);
    } else if (n == 3) {
        const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
        if (disc < 0.0) return out;
        const double q = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
        if (q == 0.0) {
            keep(0.0);
        } else {
            keep(q / c[2]);
            keep(c[0] / q);
        }
    } else {
        // Roots of the derivative split ]lo,hi[ into monotone pieces; bisect each sign change.
        double top = hi;
        if (std::isinf(top)) {
            double m = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) m = std::max(m, std::fabs(c[k] / c[n - 1]));
            top = 1.0 + m;
            if (top <= lo) return out;
        }
        double bottom = lo;
        if (std::isinf(bottom)) {
            double m = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) m = std::max(m, std::fabs(c[k] / c[n - 1]));
            bottom = -(1.0 + m);
        }
        std::vector<double> dc(n - 1);
        for (std::size_t k = 1; k < n; ++k) dc[k - 1] = c[k] * static_cast<double>(k);
        std::vector<double> knots{bottom};
        for (double x : polynomial_roots_in(dc, bottom, top)) knots.push_back(x);
        knots.push_back(top);
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            double a = knots[i], b = knots[i + 1];
            double fa = horner(c, a), fb = horner(c, b);
            if (fa == 0.0) {
                if (i > 0) keep(a);
                continue;
            }
            if (sign_of(fa) == sign_of(fb) || fb == 0.0) continue;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;
                const double fm = horner(c, m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (sign_of(fm) == sign_of(fa)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            keep(0.5 * (a + b));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ProfitFunction::ProfitFunction(std::vector<Segment> segments) : segments_(std::move(segments)) {
    check_segments(segments_);
    tail0_ = tail_at_zero_of(segments_.front());
    tail_inf_ = tail_at_infinity_of(segments_.back());

    std::vector<double> cuts;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (i > 0) cuts.push_back(s.lo);
        if (!form_is_zero(s.form)) {
            for (double x : form_roots(s.form, s.lo, s.hi)) cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    breakpoints_ = cuts;

    std::vector<double> all{0.0};
    all.insert(all.end(), cuts.begin(), cuts.end());
    all.push_back(kInf);
    runs_.cuts.push_back(0.0);
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        const double x = probe_point(all[i], all[i + 1]);
        const int s = sign_of(eval(x));
        if (!runs_.signs.empty() && runs_.signs.back() == s) {
            runs_.cuts.back() = all[i + 1];
        } else {
            runs_.signs.push_back(s);
            runs_.cuts.push_back(all[i + 1]);
        }
    }
}

ProfitFunction ProfitFunction::constant(double k) { return ProfitFunction({Segment{0.0, kInf, Constant{k}}}); }

const Segment& ProfitFunction::segment_at(double x) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const Segment& s) { return v < s.lo; });
    return *(it - 1);
}

double ProfitFunction::eval(double x) const { return eval_form(segment_at(x).form, x); }

double ProfitFunction::derivative(double x) const { return derivative_form(segment_at(x).form, x); }

double ProfitFunction::rest_at_infinity(double x) const {
    const Segment& seg = segments_.back();
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                auto c = trimmed(f.coeffs);
                if (c.empty()) return 0.0;
                c.pop_back();
                return horner(c, x) * std::pow(x, f.lowest_power);
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                if (f.K != 0.0) return f.e / (x - f.f);
                return f.e * f.f / (x * (x - f.f));
            } else {
                return 0.0;
            }
        },
        seg.form);
}

double ProfitFunction::rest_at_zero(double x) const {
    const Segment& seg = segments_.front();
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                const auto c = trimmed(f.coeffs);
                if (c.empty()) return 0.0;
                std::size_t low = 0;
                while (c[low] == 0.0) ++low;
                std::vector<double> hi_terms(c.begin() + static_cast<std::ptrdiff_t>(low) + 1, c.end());
                const int p = f.lowest_power + static_cast<int>(low) + 1;
                return horner(hi_terms, x) * std::pow(x, p);
            } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                if (f.e == 0.0) return 0.0;
                if (f.f == 0.0) return f.K;
                const double v0 = f.K - f.e / f.f;
                if (v0 != 0.0) return f.e * x / (f.f * (x - f.f));
                return f.e * x * x / (f.f * f.f * (x - f.f));
            } else {
                return 0.0;
            }
        },
        seg.form);
}

ProfitFunction ProfitFunction::negated() const {
    std::vector<Segment> segs = segments_;
    for (auto& s : segs) {
        std::visit(
            [](auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Polynomial>) {
                    for (double& c : f.coeffs) c = -c;
                } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                    f.e = -f.e;
                    f.K = -f.K;
                } else if constexpr (std::is_same_v<T, Power>) {
                    f.c = -f.c;
                } else {
                    f.k = -f.k;
                }
            },
            s.form);
    }
    return ProfitFunction(std::move(segs));
}

double ProfitFunction::sup_abs(double lo, double hi) const {
    double m = 0.0;
    const int n = 400;
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i <= n; ++i) m = std::max(m, std::fabs(eval(std::exp(llo + (lhi - llo) * i / n))));
    for (const auto& s : segments_) {
        if (s.lo > lo && s.lo < hi) m = std::max(m, std::fabs(eval(s.lo)));
    }
    return m;
}

SignStructure classify_signs(const ProfitFunction& pf) {
    const auto& runs = pf.sign_runs();
    const auto& sg = runs.signs;
    const auto& cut = runs.cuts;
    const std::size_t n = sg.size();

    bool any_pos = false, any_neg = false;
    for (int s : sg) {
        any_pos = any_pos || s > 0;
        any_neg = any_neg || s < 0;
    }
    SignStructure out;
    if (!any_pos) {
        out.kind = SignKind::AllNonpositive;
        return out;
    }
    if (!any_neg) {
        out.kind = SignKind::AllNonnegative;
        return out;
    }

    auto reject = [&]() {
        std::ostringstream os;
        os << "profit sign pattern not supported (runs:";
        for (std::size_t i = 0; i < n; ++i) os << ' ' << (sg[i] > 0 ? '+' : (sg[i] < 0 ? '-' : '0'));
        os << "); expected negative/positive/negative with at most two sign changes";
        throw UnsupportedShapeError(os.str());
    };

    std::size_t i = 0;
    // Leading part: a negative run, or a zero run directly followed by the positive run.
    if (sg[0] < 0) {
        out.x1l = cut[1];
        i = 1;
        if (i < n && sg[i] == 0) ++i;
        out.x1r = cut[i];
    } else if (sg[0] == 0) {
        out.x1l = 0.0;
        out.x1r = cut[1];
        i = 1;
    } else {
        out.x1l = out.x1r = 0.0;
    }
    if (i >= n || sg[i] <= 0) reject();
    out.x2l = cut[i + 1];
    ++i;
    if (i == n) {
        out.x2r = kInf;
    } else {
        if (sg[i] == 0) {
            if (i + 1 == n) {
                out.x2r = kInf;
                i = n;
            } else {
                ++i;
            }
        }
        if (i < n) {
            if (sg[i] >= 0 || i + 1 != n) reject();
            out.x2r = cut[i];
        }
    }
    if (out.x1l == 0.0 && std::isinf(out.x2r)) {
        out.kind = SignKind::AllNonnegative;
    }
    return out;
}

bool check_vp_plus_finite(const ProfitFunction& pf, const Roots& roots) {
    const Tail& t0 = pf.tail_at_zero();
    const Tail& ti = pf.tail_at_infinity();
    const bool ok0 = t0.sign() <= 0 || t0.exponent - roots.d1 > 0.0;
    const bool oki = ti.sign() <= 0 || ti.exponent - roots.d2 < 0.0;
    return ok0 && oki;
}

bool check_vp_minus_finite(const ProfitFunction& pf, const Roots& roots) {
    const Tail& t0 = pf.tail_at_zero();
    const Tail& ti = pf.tail_at_infinity();
    const bool ok0 = t0.sign() >= 0 || t0.exponent - roots.d1 > 0.0;
    const bool oki = ti.sign() >= 0 || ti.exponent - roots.d2 < 0.0;
    return ok0 && oki;
}

GrossProfitJoin gross_profit_join(double a, double b, double c, double f, double K) {
    if (!(a >= 0.0 && b >= 0.0 && f >= 0.0 && c > 0.0) || !std::isfinite(K)) {
        throw BadParametersError("gross_profit needs a, b, f >= 0 and c > 0");
    }
    if (!(a < b)) throw BadParametersError("gross_profit needs a < b");
    const double s = a + b + f;
    const double rad = s * s - 3.0 * (a * b + (a + b) * f + K / c);
    if (rad < 0.0) throw BadParametersError("gross_profit: no C1 join point (negative radicand)");
    GrossProfitJoin j;
    j.x0 = (s + std::sqrt(rad)) / 3.0;
    if (!(j.x0 > f)) throw BadParametersError("gross_profit: join point must lie right of f");
    j.e = c * (2.0 * j.x0 - a - b) * (j.x0 - f) * (j.x0 - f);
    return j;
}

ProfitFunction gross_profit(double a, double b, double c, double f, double K) {
    const GrossProfitJoin j = gross_profit_join(a, b, c, f, K);
    return ProfitFunction({
        Segment{0.0, j.x0, Polynomial{{-c * a * b, c * (a + b), -c}, 0}},
        Segment{j.x0, kInf, ShiftedReciprocal{j.e, f, K}},
    });
}

}  // namespace gbmstop
