#pragma once

#include <functional>
#include <string>

namespace gbmstop {

/// Root of a sign-changing function on [lo, hi], searched in t = log(x).
/// f_lo and f_hi must have opposite signs (zero ends are returned directly); either may be
/// +-inf, in which case the secant step is skipped until both ends are finite.
/// Safeguarded Illinois regula falsi; stops when the log-bracket is narrower than tol.
double find_root_log(const std::function<double(double)>& f, double lo, double hi, double f_lo, double f_hi,
                     double tol = 1e-12, const std::string& what = "root");

}  // namespace gbmstop
