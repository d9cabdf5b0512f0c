#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbmstop/solver.hpp"

namespace gbmstop {

enum class Param { Alpha, Sigma2 };

const char* to_string(Param p);

struct RootDerivatives {
    double d_d1_d_alpha = 0.0;
    double d_d2_d_alpha = 0.0;
    double d_d1_d_sigma2 = 0.0;
    double d_d2_d_sigma2 = 0.0;
};

RootDerivatives root_derivatives(const GbmParams& params);

/// Signs (-1, 0, +1). The zeta derivatives share the d1 signs and the gamma derivatives the d2 signs.
struct SignCell {
    int d1_alpha = 0;
    int d2_alpha = 0;
    int d1_sigma2 = 0;
    int d2_sigma2 = 0;
    bool operator==(const SignCell&) const = default;
};

/// table is the cell as tabulated for the (r, alpha, sigma2) case split. For r < 0 and
/// r <= alpha < -sigma2/2 both roots are >= 1 and the tabulated sigma2 columns do not hold;
/// there table_defect is set and expected carries sign(d1(d1-1)) and -sign(d2(d2-1)).
/// Elsewhere expected == table.
struct PredictedSigns {
    SignCell table;
    SignCell expected;
    bool table_defect = false;
    std::string column;
};

PredictedSigns predicted_signs(const GbmParams& params);

/// d gamma / d i or d zeta / d i from implicit differentiation of the threshold equation.
/// Throws NotApplicableError unless the solution is OneSidedLower or OneSidedUpper with
/// Pi(threshold) != 0.
double threshold_gradient(const ProfitFunction& pf, const GbmParams& params, const StoppingSolution& sol,
                          Param which, const QuadConfig& cfg = {});

/// int_gamma^inf s^(-d2-1) log(s) Pi ds (> 0) or int_0^zeta s^(-d1-1) log(s) Pi ds (< 0).
double threshold_log_moment(const ProfitFunction& pf, const GbmParams& params, const StoppingSolution& sol,
                            const QuadConfig& cfg = {});

struct GradientCheck {
    double formula = 0.0;
    double finite_difference = 0.0;
    double step = 0.0;
    bool agrees = false;
};

/// Central difference of the re-solved threshold with step rel_step * max(|param|, sigma2).
/// Agreement is 1e-3 relative plus an absolute floor of 100 * 1e-12 * threshold / step
/// (the root solver's resolution propagated through the difference).
GradientCheck check_threshold_gradient(const ProfitFunction& pf, const GbmParams& params,
                                       const StoppingSolution& sol, Param which, double rel_step = 1e-4,
                                       const QuadConfig& cfg = {});

struct SensitivityReport {
    RootDerivatives roots;
    PredictedSigns predicted_signs;
    ProblemClass problem_class = ProblemClass::TrivialStopNow;
    std::string threshold_name;  // "gamma", "zeta" or empty
    std::optional<double> threshold;
    std::optional<double> d_threshold_d_alpha;
    std::optional<double> d_threshold_d_sigma2;
    std::optional<GradientCheck> fd_alpha;
    std::optional<GradientCheck> fd_sigma2;
    std::string not_applicable;  // reason when no gradient is available
};

SensitivityReport sensitivity_report(const ProfitFunction& pf, const GbmParams& params, bool with_fd = true,
                                     const QuadConfig& cfg = {});

struct SweepRow {
    double param_value = 0.0;
    std::optional<ProblemClass> problem_class;
    std::optional<double> gamma;
    std::optional<double> zeta;
    std::optional<double> delta;
    std::optional<double> beta;
    std::string excluded_reason;
};

/// Re-solves at each grid point; per-point failures become rows with excluded_reason set.
std::vector<SweepRow> sweep(const ProfitFunction& pf, const GbmParams& base, Param vary,
                            const std::vector<double>& grid, const QuadConfig& cfg = {});

}  // namespace gbmstop
