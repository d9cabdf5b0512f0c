#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "gbmstop/sensitivity.hpp"

namespace gbmstop::cli {

enum ExitCode { kOk = 0, kFailure = 1, kIllPosed = 2, kUnsupportedProfit = 3, kBadInput = 4, kVerificationFailed = 5 };

struct Options {
    std::optional<double> tol;  // quadrature rel_tol
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> paths;
    std::optional<double> dt;
    int grid = 200;
    bool mc = false;
    std::string out;  // empty: standard output
    /// Debug only: thresholds are multiplied by this factor before V is built.
    std::optional<double> corrupt_threshold;
};

/// Points for eval: explicit xs, or n points from lo to hi (geometric if log_spaced).
struct PointSpec {
    std::vector<double> xs;
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    bool log_spaced = false;
    std::vector<double> points() const;
};

int cmd_solve(const std::string& config, const Options& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const std::string& config, const PointSpec& pts, const Options& opt, std::ostream& out,
             std::ostream& err);
int cmd_sweep(const std::string& config, Param vary, const PointSpec& values, const Options& opt, std::ostream& out,
              std::ostream& err);
/// which: "alpha", "sigma2" or "both".
int cmd_sensitivity(const std::string& config, const std::string& which, const Options& opt, std::ostream& out,
                    std::ostream& err);
/// mc_points are only used with opt.mc; empty picks one point inside the continuation region.
int cmd_verify(const std::string& config, const std::vector<double>& mc_points, const Options& opt,
               std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal, '.' separator whatever the locale; inf as "inf".
std::string format_double(double v);

}  // namespace gbmstop::cli
