#pragma once

#include "gbmstop/errors.hpp"

namespace gbmstop {

/// Roots of the characteristic polynomial, d1 < d2.
struct Roots {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// GBM parameters dX = alpha X dt + sigma X dW discounted at rate r.
/// Construction validates admissibility; an existing object is always well posed.
class GbmParams {
public:
    GbmParams(double r, double alpha, double sigma2);

    /// Inverse of the root map: r = -(s2/2) d1 d2, alpha = (s2/2)(1 - d1 - d2).
    static GbmParams from_roots(double d1, double d2, double sigma2);

    double r() const { return r_; }
    double alpha() const { return alpha_; }
    double sigma2() const { return sigma2_; }
    const Roots& roots() const { return roots_; }
    double discriminant() const;

private:
    double r_;
    double alpha_;
    double sigma2_;
    Roots roots_;
};

/// (sigma2/2) d^2 + (alpha - sigma2/2) d - r
double char_poly(const GbmParams& params, double d);

/// (sigma2/2 - alpha)^2 + 2 sigma2 r
double discriminant(double r, double alpha, double sigma2);

/// Throws IllPosedError unless sigma2 > 0 and the discriminant is strictly positive.
void validate(double r, double alpha, double sigma2);

/// Validates and returns the roots (larger-magnitude root by formula, the other by Vieta).
Roots compute_roots(double r, double alpha, double sigma2);

}  // namespace gbmstop
