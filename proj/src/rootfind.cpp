#include "gbmstop/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gbmstop/errors.hpp"

namespace gbmstop {

double find_root_log(const std::function<double(double)>& f, double lo, double hi, double f_lo, double f_hi,
                     double tol, const std::string& what) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0.0) == (f_hi > 0.0)) {
        std::ostringstream os;
        os.precision(10);
        os << what << ": no sign change on [" << lo << ", " << hi << "] (f = " << f_lo << ", " << f_hi << ")";
        throw BracketFailureError(os.str());
    }
    double a = std::log(lo), b = std::log(hi);
    double fa = f_lo, fb = f_hi;
    int side = 0;  // end replaced on the previous step: -1 a, +1 b
    double w1 = b - a, w2 = b - a;  // bracket widths one and two steps back
    for (int it = 0; it < 400; ++it) {
        const double width = b - a;
        if (width <= tol) break;
        double t = 0.5 * (a + b);
        const bool secant_ok = std::isfinite(fa) && std::isfinite(fb) && fa != fb;
        // Bisect when the bracket has not halved over the last two steps.
        if (secant_ok && !(it >= 2 && width > 0.5 * w2)) {
            const double s = b - fb * (b - a) / (fb - fa);
            const double guard = 1e-3 * width;
            if (std::isfinite(s)) t = std::min(std::max(s, a + guard), b - guard);
        }
        w2 = w1;
        w1 = width;
        const double ft = f(std::exp(t));
        if (std::isnan(ft)) {
            std::ostringstream os;
            os << what << ": function returned NaN at " << std::exp(t);
            throw BracketFailureError(os.str());
        }
        if (ft == 0.0) return std::exp(t);
        if ((ft > 0.0) == (fa > 0.0)) {
            a = t;
            fa = ft;
            if (side == -1 && std::isfinite(fb)) fb *= 0.5;
            side = -1;
        } else {
            b = t;
            fb = ft;
            if (side == 1 && std::isfinite(fa)) fa *= 0.5;
            side = 1;
        }
    }
    return std::exp(0.5 * (a + b));
}

}  // namespace gbmstop
