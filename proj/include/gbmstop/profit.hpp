#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "gbmstop/model.hpp"

namespace gbmstop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// sum_k coeffs[k] * x^(lowest_power + k). lowest_power < 0 gives a Laurent polynomial.
struct Polynomial {
    std::vector<double> coeffs;
    int lowest_power = 0;
};

/// e / (x - f) + K. The pole f may lie on either side of the segment but not inside it.
struct ShiftedReciprocal {
    double e = 0.0;
    double f = 0.0;
    double K = 0.0;
};

/// c * x^p
struct Power {
    double c = 0.0;
    double p = 0.0;
};

struct Constant {
    double k = 0.0;
};

using SegmentForm = std::variant<Polynomial, ShiftedReciprocal, Power, Constant>;

/// Form valid on [lo, hi). The first segment starts at 0, the last ends at +inf.
struct Segment {
    double lo = 0.0;
    double hi = kInf;
    SegmentForm form;
};

/// Behaviour of the outermost segment at 0 or at +inf:
/// Pi(x) = coeff x^exponent + rest(x), |rest(x)| <= rest_bound x^rest_exponent
/// for x >= rest_from (at infinity) or x <= rest_from (at zero).
struct Tail {
    bool zero = false;
    double coeff = 0.0;
    double exponent = 0.0;
    double rest_bound = 0.0;
    double rest_exponent = 0.0;
    double rest_from = 0.0;

    int sign() const { return zero || coeff == 0.0 ? 0 : (coeff > 0.0 ? 1 : -1); }
};

enum class SignKind { Regular, AllNonnegative, AllNonpositive };

/// Pi < 0 on ]0,x1l[ and ]x2r,inf[, Pi = 0 on [x1l,x1r] and [x2l,x2r], Pi > 0 on ]x1r,x2l[.
struct SignStructure {
    SignKind kind = SignKind::Regular;
    double x1l = 0.0;
    double x1r = 0.0;
    double x2l = kInf;
    double x2r = kInf;
};

class ProfitFunction {
public:
    /// Throws BadParametersError if the segments do not partition ]0, inf[.
    explicit ProfitFunction(std::vector<Segment> segments);

    static ProfitFunction constant(double k);

    double operator()(double x) const { return eval(x); }
    double eval(double x) const;
    double derivative(double x) const;

    /// Pi(x) minus the leading tail term of the end segment. Only meaningful on that segment.
    double rest_at_infinity(double x) const;
    double rest_at_zero(double x) const;

    const std::vector<Segment>& segments() const { return segments_; }
    const Segment& segment_at(double x) const;

    /// Segment joins and zeros of Pi, sorted, all in ]0, inf[.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    const Tail& tail_at_zero() const { return tail0_; }
    const Tail& tail_at_infinity() const { return tail_inf_; }

    ProfitFunction negated() const;

    /// max |Pi| over a log-spaced sample of [lo, hi] plus its breakpoints.
    double sup_abs(double lo, double hi) const;

    /// Sign runs between consecutive breakpoints: run i covers ]cuts[i], cuts[i+1][.
    struct SignRuns {
        std::vector<double> cuts;
        std::vector<int> signs;
    };
    const SignRuns& sign_runs() const { return runs_; }

private:
    std::vector<Segment> segments_;
    std::vector<double> breakpoints_;
    Tail tail0_;
    Tail tail_inf_;
    SignRuns runs_;
};

/// Throws UnsupportedShapeError when Pi has more than two sign changes or the wrong order.
SignStructure classify_signs(const ProfitFunction& pf);

bool check_vp_plus_finite(const ProfitFunction& pf, const Roots& roots);
bool check_vp_minus_finite(const ProfitFunction& pf, const Roots& roots);

/// -c(x-a)(x-b) on ]0,x0], e/(x-f)+K beyond, joined C1 at x0.
ProfitFunction gross_profit(double a, double b, double c, double f, double K);

struct GrossProfitJoin {
    double x0 = 0.0;
    double e = 0.0;
};
GrossProfitJoin gross_profit_join(double a, double b, double c, double f, double K);

/// Real roots of sum coeffs[k] x^k strictly inside ]lo, hi[ (hi may be inf), ascending.
std::vector<double> polynomial_roots_in(const std::vector<double>& coeffs, double lo, double hi);

}  // namespace gbmstop
