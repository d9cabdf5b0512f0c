#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gbmstop/solver.hpp"
#include "gbmstop/verify.hpp"

namespace gbmstop::cli {

/// Parse or validation failure anchored to the config source. line is 1-based, 0 if unknown.
class ConfigError : public Error {
public:
    ConfigError(int line, std::string key, const std::string& msg);
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

struct ModelSpec {
    double r = 0.0;
    double alpha = 0.0;
    double sigma2 = 0.0;
};

struct GrossProfitSpec {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double f = 0.0;
    double K = 0.0;
};

using ProfitSpec = std::variant<GrossProfitSpec, std::vector<Segment>>;

struct ProblemConfig {
    ModelSpec model;
    ProfitSpec profit;
    QuadConfig quadrature;
    McConfig mc;
};

ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);
/// YAML with every double at round-trip precision.
std::string serialize_config(const ProblemConfig& cfg);

/// Throws IllPosedError for inadmissible model parameters.
GbmParams make_params(const ProblemConfig& cfg);
ProfitFunction make_profit(const ProblemConfig& cfg);

}  // namespace gbmstop::cli
