#pragma once

#include "gbmstop/model.hpp"
#include "gbmstop/profit.hpp"

namespace gbmstop {

struct QuadConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_subdivisions = 2000;
};

/// convergent is false when the tolerance could not be met because the estimate hit the
/// rounding floor (about 50 eps times the integral of |integrand|); the value is still the
/// best attainable. Running out of subdivisions throws NoConvergenceError instead.
struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool convergent = true;
};

/// Analytic convergence of int s^(-d-1) Pi(s) ds at each improper end. The log-weighted
/// variant has the same convergence class.
bool converges_at_zero(const ProfitFunction& pf, double d);
bool converges_at_infinity(const ProfitFunction& pf, double d);

/// int_a^b s^(-d-1) Pi(s) ds, a may be 0 and b may be inf. a > b gives the negated integral.
IntegralResult weighted_integral(const ProfitFunction& pf, double d, double a, double b,
                                 const QuadConfig& cfg = {});

/// int_a^b s^(-d-1) log(s) Pi(s) ds
IntegralResult log_weighted_integral(const ProfitFunction& pf, double d, double a, double b,
                                     const QuadConfig& cfg = {});

/// int_{x*}^{x} [(x/s)^d2 - (x/s)^d1] / s * Pi(s) ds, signed.
IntegralResult kernel_integral(const ProfitFunction& pf, const Roots& roots, double x_star, double x,
                               const QuadConfig& cfg = {});

/// x times the x-derivative of kernel_integral:
/// int_{x*}^{x} [d2 (x/s)^d2 - d1 (x/s)^d1] / s * Pi(s) ds.
IntegralResult kernel_derivative_integral(const ProfitFunction& pf, const Roots& roots, double x_star,
                                          double x, const QuadConfig& cfg = {});

}  // namespace gbmstop
