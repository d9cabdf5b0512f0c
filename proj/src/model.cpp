#include "gbmstop/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gbmstop {

double discriminant(double r, double alpha, double sigma2) {
    const double b = 0.5 * sigma2 - alpha;
    return b * b + 2.0 * sigma2 * r;
}

namespace {

// The discriminant is a difference of two rounded products. Anything within a few
// ulps of the larger term is indistinguishable from zero.
bool discriminant_is_zero(double r, double alpha, double sigma2, double disc) {
    const double b = 0.5 * sigma2 - alpha;
    const double scale = b * b + std::fabs(2.0 * sigma2 * r);
    return std::fabs(disc) <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

void validate(double r, double alpha, double sigma2) {
    if (!std::isfinite(r) || !std::isfinite(alpha) || !std::isfinite(sigma2)) {
        throw IllPosedError(IllPosedReason::NonFinite, "model parameters must be finite");
    }
    if (!(sigma2 > 0.0)) {
        std::ostringstream os;
        os << "sigma2 must be positive (got " << sigma2 << ")";
        throw IllPosedError(IllPosedReason::NonPositiveVariance, os.str());
    }
    const double disc = discriminant(r, alpha, sigma2);
    const double b = 0.5 * sigma2 - alpha;
    const double bound = -(b * b) / (2.0 * sigma2);
    if (discriminant_is_zero(r, alpha, sigma2, disc)) {
        std::ostringstream os;
        os.precision(17);
        os << "characteristic roots coincide: r = " << r << " equals the admissibility bound "
           << bound << " = -(sigma2/2 - alpha)^2 / (2 sigma2)";
        throw IllPosedError(IllPosedReason::EqualRoots, os.str());
    }
    if (disc < 0.0) {
        std::ostringstream os;
        os.precision(17);
        os << "characteristic roots are complex: r = " << r
           << " must exceed -(sigma2/2 - alpha)^2 / (2 sigma2) = " << bound;
        throw IllPosedError(IllPosedReason::ComplexRoots, os.str());
    }
}

Roots compute_roots(double r, double alpha, double sigma2) {
    validate(r, alpha, sigma2);
    const double b = 0.5 * sigma2 - alpha;
    const double sq = std::sqrt(discriminant(r, alpha, sigma2));
    // P(d) = (s2/2) d^2 - b d - r, roots (b -+ sq)/s2, product -2r/s2.
    const double product = -2.0 * r / sigma2;
    Roots out;
    if (b >= 0.0) {
        out.d2 = (b + sq) / sigma2;
        out.d1 = product / out.d2;
    } else {
        out.d1 = (b - sq) / sigma2;
        out.d2 = product / out.d1;
    }
    return out;
}

GbmParams::GbmParams(double r, double alpha, double sigma2)
    : r_(r), alpha_(alpha), sigma2_(sigma2), roots_(compute_roots(r, alpha, sigma2)) {}

GbmParams GbmParams::from_roots(double d1, double d2, double sigma2) {
    if (!(d1 < d2)) {
        throw BadParametersError("from_roots requires d1 < d2");
    }
    const double h = 0.5 * sigma2;
    return GbmParams(-h * d1 * d2, h * (1.0 - d1 - d2), sigma2);
}

double GbmParams::discriminant() const { return gbmstop::discriminant(r_, alpha_, sigma2_); }

double char_poly(const GbmParams& params, double d) {
    const double h = 0.5 * params.sigma2();
    return h * d * d + (params.alpha() - h) * d - params.r();
}

}  // namespace gbmstop
