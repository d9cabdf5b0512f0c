#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace gbmstop::cli {

namespace {

std::string anchored(int line, const std::string& key, const std::string& msg) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    if (!key.empty()) os << key << ": ";
    os << msg;
    return os.str();
}

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void expect_map(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) throw ConfigError(line_of(n), path, "expected a mapping");
}

void reject_unknown(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& kv : n) {
        const auto k = kv.first.as<std::string>();
        if (!allowed.count(k)) throw ConfigError(line_of(kv.first), join(path, k), "unknown key");
    }
}

double as_double(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) throw ConfigError(line_of(n), key, "expected a number");
    const std::string s = n.Scalar();
    static const std::set<std::string> pos_inf{"inf", "+inf", ".inf", "+.inf", ".Inf", ".INF"};
    static const std::set<std::string> neg_inf{"-inf", "-.inf", "-.Inf", "-.INF"};
    if (pos_inf.count(s)) return kInf;
    if (neg_inf.count(s)) return -kInf;
    // from_chars ignores the global locale, unlike yaml-cpp's stream conversion.
    const char* first = s.data() + (!s.empty() && s[0] == '+');
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v) || first == s.data() + s.size())
        throw ConfigError(line_of(n), key, "expected a number, got '" + s + "'");
    return v;
}

template <class T>
T as_integer(const YAML::Node& n, const std::string& key) {
    const std::string s = n.IsScalar() ? n.Scalar() : std::string();
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(line_of(n), key, "expected an integer");
    return v;
}

double required(const YAML::Node& parent, const std::string& path, const char* key) {
    const YAML::Node n = parent[key];
    if (!n) throw ConfigError(line_of(parent), join(path, key), "missing");
    return as_double(n, join(path, key));
}

void optional_double(const YAML::Node& parent, const std::string& path, const char* key, double& out) {
    if (const YAML::Node n = parent[key]) out = as_double(n, join(path, key));
}

Segment parse_segment(const YAML::Node& n, const std::string& path) {
    expect_map(n, path);
    const YAML::Node kind = n["kind"];
    if (!kind) throw ConfigError(line_of(n), join(path, "kind"), "missing");
    const auto k = kind.as<std::string>();
    const YAML::Node iv = n["interval"];
    if (!iv) throw ConfigError(line_of(n), join(path, "interval"), "missing");
    if (!iv.IsSequence() || iv.size() != 2)
        throw ConfigError(line_of(iv), join(path, "interval"), "expected [lo, hi]");
    Segment seg;
    seg.lo = as_double(iv[0], join(path, "interval"));
    seg.hi = as_double(iv[1], join(path, "interval"));
    if (k == "polynomial") {
        reject_unknown(n, path, {"kind", "interval", "coeffs", "lowest_power"});
        const YAML::Node c = n["coeffs"];
        if (!c || !c.IsSequence() || c.size() == 0)
            throw ConfigError(line_of(c ? c : n), join(path, "coeffs"), "expected a non-empty list");
        Polynomial p;
        for (const auto& v : c) p.coeffs.push_back(as_double(v, join(path, "coeffs")));
        if (const YAML::Node lp = n["lowest_power"]) p.lowest_power = as_integer<int>(lp, join(path, "lowest_power"));
        seg.form = p;
    } else if (k == "shifted_reciprocal") {
        reject_unknown(n, path, {"kind", "interval", "e", "f", "K"});
        seg.form = ShiftedReciprocal{required(n, path, "e"), required(n, path, "f"), required(n, path, "K")};
    } else if (k == "power") {
        reject_unknown(n, path, {"kind", "interval", "c", "p"});
        seg.form = Power{required(n, path, "c"), required(n, path, "p")};
    } else if (k == "constant") {
        reject_unknown(n, path, {"kind", "interval", "k"});
        seg.form = Constant{required(n, path, "k")};
    } else {
        throw ConfigError(line_of(kind), join(path, "kind"),
                          "unknown segment kind '" + k + "' (polynomial, shifted_reciprocal, power, constant)");
    }
    return seg;
}

ProfitSpec parse_profit(const YAML::Node& n) {
    expect_map(n, "profit");
    reject_unknown(n, "profit", {"gross_profit", "segments"});
    const YAML::Node gp = n["gross_profit"];
    const YAML::Node segs = n["segments"];
    if (gp && segs) throw ConfigError(line_of(n), "profit", "give either gross_profit or segments, not both");
    if (gp) {
        expect_map(gp, "profit.gross_profit");
        reject_unknown(gp, "profit.gross_profit", {"a", "b", "c", "f", "K"});
        const std::string p = "profit.gross_profit";
        return GrossProfitSpec{required(gp, p, "a"), required(gp, p, "b"), required(gp, p, "c"), required(gp, p, "f"),
                               required(gp, p, "K")};
    }
    if (!segs) throw ConfigError(line_of(n), "profit", "needs gross_profit or segments");
    if (!segs.IsSequence() || segs.size() == 0)
        throw ConfigError(line_of(segs), "profit.segments", "expected a non-empty list");
    std::vector<Segment> out;
    for (std::size_t i = 0; i < segs.size(); ++i)
        out.push_back(parse_segment(segs[i], "profit.segments[" + std::to_string(i) + "]"));
    return out;
}

// Numbers are emitted as preformatted scalars so the output does not depend on the locale.
std::string number(double v) {
    if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
    char buf[32];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

template <class T>
std::string number(T v) requires std::is_integral_v<T> {
    char buf[24];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

template <class T>
void kv(YAML::Emitter& out, const char* key, T v) {
    out << YAML::Key << key << YAML::Value << number(v);
}

}  // namespace

ConfigError::ConfigError(int line, std::string key, const std::string& msg)
    : Error(anchored(line, key, msg)), line_(line), key_(std::move(key)) {}

ProblemConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.mark.line + 1, "", e.msg);
    }
    if (!root || !root.IsMap()) throw ConfigError(1, "", "config must be a mapping with model and profit sections");
    reject_unknown(root, "", {"model", "profit", "quadrature", "mc"});

    ProblemConfig cfg;
    const YAML::Node m = root["model"];
    if (!m) throw ConfigError(0, "model", "missing");
    expect_map(m, "model");
    reject_unknown(m, "model", {"r", "alpha", "sigma2"});
    cfg.model = {required(m, "model", "r"), required(m, "model", "alpha"), required(m, "model", "sigma2")};

    const YAML::Node p = root["profit"];
    if (!p) throw ConfigError(0, "profit", "missing");
    cfg.profit = parse_profit(p);

    if (const YAML::Node q = root["quadrature"]) {
        expect_map(q, "quadrature");
        reject_unknown(q, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
        optional_double(q, "quadrature", "rel_tol", cfg.quadrature.rel_tol);
        optional_double(q, "quadrature", "abs_tol", cfg.quadrature.abs_tol);
        if (const YAML::Node n = q["max_subdivisions"])
            cfg.quadrature.max_subdivisions = as_integer<int>(n, "quadrature.max_subdivisions");
        if (!(cfg.quadrature.rel_tol > 0.0) || cfg.quadrature.max_subdivisions < 1)
            throw ConfigError(line_of(q), "quadrature", "rel_tol must be positive and max_subdivisions >= 1");
    }
    if (const YAML::Node mc = root["mc"]) {
        expect_map(mc, "mc");
        reject_unknown(mc, "mc", {"seed", "paths", "dt", "t_max"});
        if (const YAML::Node n = mc["seed"]) cfg.mc.seed = as_integer<std::uint64_t>(n, "mc.seed");
        if (const YAML::Node n = mc["paths"]) cfg.mc.n_paths = as_integer<std::int64_t>(n, "mc.paths");
        optional_double(mc, "mc", "dt", cfg.mc.dt);
        if (const YAML::Node n = mc["t_max"]) cfg.mc.t_max = as_double(n, "mc.t_max");
        if (!(cfg.mc.dt > 0.0) || cfg.mc.n_paths < 2)
            throw ConfigError(line_of(mc), "mc", "dt must be positive and paths >= 2");
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ProblemConfig& cfg) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    kv(out, "r", cfg.model.r);
    kv(out, "alpha", cfg.model.alpha);
    kv(out, "sigma2", cfg.model.sigma2);
    out << YAML::EndMap;

    out << YAML::Key << "profit" << YAML::Value << YAML::BeginMap;
    if (const auto* gp = std::get_if<GrossProfitSpec>(&cfg.profit)) {
        out << YAML::Key << "gross_profit" << YAML::Value << YAML::BeginMap;
        kv(out, "a", gp->a);
        kv(out, "b", gp->b);
        kv(out, "c", gp->c);
        kv(out, "f", gp->f);
        kv(out, "K", gp->K);
        out << YAML::EndMap;
    } else {
        out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
        for (const Segment& s : std::get<std::vector<Segment>>(cfg.profit)) {
            out << YAML::BeginMap;
            out << YAML::Key << "interval" << YAML::Value << YAML::Flow << YAML::BeginSeq;
            out << number(s.lo) << number(s.hi);
            out << YAML::EndSeq;
            std::visit(
                [&](const auto& f) {
                    using T = std::decay_t<decltype(f)>;
                    if constexpr (std::is_same_v<T, Polynomial>) {
                        out << YAML::Key << "kind" << YAML::Value << "polynomial";
                        out << YAML::Key << "coeffs" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                        for (double c : f.coeffs) out << number(c);
                        out << YAML::EndSeq;
                        kv(out, "lowest_power", f.lowest_power);
                    } else if constexpr (std::is_same_v<T, ShiftedReciprocal>) {
                        out << YAML::Key << "kind" << YAML::Value << "shifted_reciprocal";
                        kv(out, "e", f.e);
                        kv(out, "f", f.f);
                        kv(out, "K", f.K);
                    } else if constexpr (std::is_same_v<T, Power>) {
                        out << YAML::Key << "kind" << YAML::Value << "power";
                        kv(out, "c", f.c);
                        kv(out, "p", f.p);
                    } else {
                        out << YAML::Key << "kind" << YAML::Value << "constant";
                        kv(out, "k", f.k);
                    }
                },
                s.form);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;

    out << YAML::Key << "quadrature" << YAML::Value << YAML::BeginMap;
    kv(out, "rel_tol", cfg.quadrature.rel_tol);
    kv(out, "abs_tol", cfg.quadrature.abs_tol);
    kv(out, "max_subdivisions", cfg.quadrature.max_subdivisions);
    out << YAML::EndMap;

    out << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
    kv(out, "seed", cfg.mc.seed);
    kv(out, "paths", cfg.mc.n_paths);
    kv(out, "dt", cfg.mc.dt);
    if (cfg.mc.t_max) kv(out, "t_max", *cfg.mc.t_max);
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

GbmParams make_params(const ProblemConfig& cfg) { return GbmParams(cfg.model.r, cfg.model.alpha, cfg.model.sigma2); }

ProfitFunction make_profit(const ProblemConfig& cfg) {
    if (const auto* gp = std::get_if<GrossProfitSpec>(&cfg.profit))
        return gross_profit(gp->a, gp->b, gp->c, gp->f, gp->K);
    return ProfitFunction(std::get<std::vector<Segment>>(cfg.profit));
}

}  // namespace gbmstop::cli
