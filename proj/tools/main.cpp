#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace gbmstop;
using namespace gbmstop::cli;

namespace {

void add_common(CLI::App* sub, std::string& config, Options& opt) {
    sub->add_option("config", config, "problem config (YAML)")->required();
    sub->add_option("--tol", opt.tol, "quadrature relative tolerance");
    sub->add_option("--seed", opt.seed, "Monte Carlo seed");
    sub->add_option("--paths", opt.paths, "Monte Carlo paths");
    sub->add_option("--dt", opt.dt, "Monte Carlo time step");
    sub->add_option("--grid", opt.grid, "number of grid points")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "write CSV or the solution record here");
}

void add_points(CLI::App* sub, PointSpec& ps, const std::string& what) {
    sub->add_option("--x", ps.xs, "explicit " + what)->delimiter(',');
    sub->add_option("--from", ps.lo, "first " + what);
    sub->add_option("--to", ps.hi, "last " + what);
    sub->add_option("--n", ps.n, "number of points between --from and --to");
    sub->add_flag("--log", ps.log_spaced, "geometric spacing");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perpetual optimal stopping and entrance on geometric Brownian motion"};
    app.require_subcommand(1);
    std::string config;
    Options opt;

    auto* solve = app.add_subcommand("solve", "classify the problem and solve for the thresholds");
    add_common(solve, config, opt);
    solve->add_option("--corrupt-threshold", opt.corrupt_threshold, "debug: scale the thresholds")->group("");

    PointSpec eval_pts;
    auto* eval = app.add_subcommand("eval", "V and V' at points, as CSV");
    add_common(eval, config, opt);
    add_points(eval, eval_pts, "x values");

    PointSpec sweep_pts;
    std::string vary = "alpha";
    auto* sweep = app.add_subcommand("sweep", "re-solve over alpha or sigma2 values, as CSV");
    add_common(sweep, config, opt);
    sweep->add_option("--vary", vary, "alpha or sigma2")->check(CLI::IsMember({"alpha", "sigma2"}));
    add_points(sweep, sweep_pts, "parameter values");

    std::string which = "both";
    auto* sens = app.add_subcommand("sensitivity", "threshold gradients and predicted signs");
    add_common(sens, config, opt);
    sens->add_option("--which", which, "alpha, sigma2 or both")->check(CLI::IsMember({"alpha", "sigma2", "both"}));

    std::vector<double> mc_points;
    auto* verify = app.add_subcommand("verify", "smooth fit, HJB residual, transversality and optional Monte Carlo");
    add_common(verify, config, opt);
    verify->add_flag("--mc", opt.mc, "also run Monte Carlo consistency and dominance");
    verify->add_option("--x", mc_points, "Monte Carlo starting points")->delimiter(',');
    verify->add_option("--corrupt-threshold", opt.corrupt_threshold, "debug: scale the thresholds")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    if (*solve) return cmd_solve(config, opt, std::cout, std::cerr);
    if (*eval) return cmd_eval(config, eval_pts, opt, std::cout, std::cerr);
    if (*sweep) return cmd_sweep(config, vary == "alpha" ? Param::Alpha : Param::Sigma2, sweep_pts, opt, std::cout,
                                 std::cerr);
    if (*sens) return cmd_sensitivity(config, which, opt, std::cout, std::cerr);
    return cmd_verify(config, mc_points, opt, std::cout, std::cerr);
}
