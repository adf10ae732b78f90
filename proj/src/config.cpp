#include "roughlab/config.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace roughlab {

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

RawConfig parse_config(std::istream& is, const std::string& source) {
    RawConfig raw;
    raw.source = source;
    std::string line;
    std::size_t number = 0;
    while (std::getline(is, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(source, number, "expected 'key = value', got '" + body + "'");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError(source, number, "missing key before '='");
        for (char c : key) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
                throw ConfigError(source, number, "invalid character in key '" + key + "'");
            }
        }
        if (value.empty()) throw ConfigError(source, number, "missing value for '" + key + "'");
        auto [it, inserted] = raw.entries.emplace(key, ConfigEntry{value, number});
        if (!inserted) {
            throw ConfigError(source, number,
                              "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
        }
    }
    return raw;
}

RawConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open config file");
    return parse_config(in, path);
}

namespace {

ParamSpec real(std::string key, std::string def, std::string help, double lo = -1e300, double hi = 1e300) {
    return {std::move(key), ParamType::real, std::move(def), std::move(help), {}, lo, hi};
}
ParamSpec integer(std::string key, std::string def, std::string help, double lo = 0, double hi = 1e18) {
    return {std::move(key), ParamType::integer, std::move(def), std::move(help), {}, lo, hi};
}
ParamSpec text(std::string key, std::string def, std::string help, std::vector<std::string> choices = {}) {
    return {std::move(key), ParamType::text, std::move(def), std::move(help), std::move(choices)};
}
ParamSpec reals(std::string key, std::string def, std::string help) {
    return {std::move(key), ParamType::real_list, std::move(def), std::move(help), {}};
}
ParamSpec integers(std::string key, std::string def, std::string help, double lo = 0, double hi = 1e18) {
    return {std::move(key), ParamType::integer_list, std::move(def), std::move(help), {}, lo, hi};
}

std::vector<ParamSpec> noise_params(const std::string& noise, const std::string& H) {
    return {
        text("noise", noise, "driving noise", {"bm", "fbm", "ou", "time_changed_bm"}),
        real("H", H, "Hurst index of fbm", 0.01, 0.99),
        real("theta", "1", "OU mean reversion", 1e-9),
        real("sigma", "1", "OU volatility", 0.0),
        real("clock_power", "2", "time change c(t) = T (t/T)^p", 1e-6),
    };
}

std::vector<ParamSpec> lift_params(const std::string& lift, const std::string& alpha, const std::string& N) {
    return {
        text("lift", lift, "renormalisation of the lift", {"hermite", "geometric", "ito"}),
        real("alpha", alpha, "Holder exponent; sets the level k = floor(1/alpha)", 0.05, 1.0),
        real("T", "1", "horizon", 1e-9),
        integer("N", N, "grid steps", 2, 1 << 22),
    };
}

std::vector<ParamSpec> join(std::vector<std::vector<ParamSpec>> parts) {
    std::vector<ParamSpec> out;
    for (auto& p : parts) {
        for (auto& q : p) out.push_back(std::move(q));
    }
    return out;
}

std::vector<ExperimentSchema> build_schemas() {
    std::vector<ExperimentSchema> s;
    s.push_back({"lift", "rough path lift of a sampled noise with Chen residual and renormalisation round trip",
                 join({noise_params("bm", "0.5"), lift_params("hermite", "0.3", "256"),
                       {integer("chen_triples", "10000", "random triples for the Chen residual", 1)}})});
    s.push_back({"integrate", "compensated Riemann sums of a polynomial integrand and their refinement order",
                 join({noise_params("fbm", "0.4"), lift_params("hermite", "0.35", "4096"),
                       {reals("polynomial", "0,0,1", "coefficients in ascending powers"),
                        integers("meshes", "1,2,4,8,16", "strides in grid steps", 1),
                        integer("path_index", "0", "which simulated path")}})});
    s.push_back({"ito", "rough Ito formula residual",
                 join({noise_params("bm", "0.5"), lift_params("hermite", "0.3", "4096"),
                       {text("function", "sin", "F in the formula", {"x2", "x3", "sin", "exp"}),
                        integer("paths", "20", "number of paths", 1)}})});
    s.push_back({"mc-unbiased", "Monte Carlo mean of rough integrals against random lifts, per integrand and stopping",
                 join({noise_params("bm", "0.5"), lift_params("hermite", "0.45", "1024"),
                       {integer("M", "100000", "paths", 1000),
                        text("integrands", "poly(0,1);poly(0,0,1);sig(1,0);simple(0.25,0.75)",
                             "';'-separated poly(c0,c1,..), sig(n,s), simple(s,u)"),
                        text("stoppings", "T", "';'-separated T, t=<time>, clock=<level>")}})});
    s.push_back({"balance", "Chen-Hermite balancing sums of two adjacent increments",
                 {text("process", "bm", "increment law", {"bm", "fbm", "ou", "time_changed_bm", "sarmanov"}),
                  real("H", "0.5", "Hurst index of fbm", 0.01, 0.99), real("theta", "1", "OU mean reversion", 1e-9),
                  real("sigma", "1", "OU volatility", 0.0), real("clock_power", "2", "time change power", 1e-6),
                  real("epsilon", "0.3", "Sarmanov coupling"), integers("levels", "2,3,4,5", "orders n", 2, 20),
                  real("s", "0", "first time", 0.0), real("u", "1", "middle time", 0.0), real("t", "2", "last time", 0.0),
                  integer("M", "100000", "samples", 2)}});
    s.push_back({"sarmanov", "non-Gaussian pairs with Gaussian marginals and Gaussian sum",
                 {real("epsilon", "0.3", "coupling; 2|epsilon| < 1"), integer("M", "100000", "pairs", 2),
                  real("ks_level", "0.001", "KS significance level", 0.0, 1.0),
                  integers("levels", "2,3,4,5", "balancing orders", 2, 20),
                  integer("write_samples", "1", "write the pairs to samples.csv", 0, 1)}});
    s.push_back({"rde", "Davie scheme for dY = Y dX against geometric Brownian motion",
                 {real("T", "1", "horizon", 1e-9), integers("Ns", "256,1024,4096", "grid sizes", 2, 1 << 20),
                  integer("paths", "1000", "paths", 1), real("scale", "1", "vector field f(y) = scale y"),
                  real("y0", "1", "initial value")}});
    s.push_back({"arbitrage", "power-mean pathwise arbitrage",
                 {integer("paths", "1000", "markets", 1), integer("N", "2048", "coarse steps", 1, 1 << 20),
                  integer("refinement", "64", "fine steps per coarse step", 16, 4096),
                  integer("d", "2", "risky assets", 1, 64), real("H", "0.7", "Hurst index", 0.01, 0.99),
                  real("sigma", "1", "volatility", 0.0), real("T", "1", "horizon", 1e-9), real("p", "1", "short power"),
                  real("q", "2", "long power"),
                  text("scheme", "young", "lift of the prices", {"young", "stratonovich", "ito"})}});
    s.push_back({"clock", "renormalisation clock time change",
                 {real("T", "1", "horizon", 1e-9), integer("N", "4096", "grid steps", 2, 1 << 22),
                  real("power", "2", "G2(s) = s^power", 1e-6), integer("clock_N", "256", "clock grid steps", 1),
                  real("level_fraction", "0.9", "clock horizon as a fraction of G2(T)", 1e-6, 1.0 - 1e-9)}});
    return s;
}

bool parse_int(const std::string& v, std::int64_t& out) {
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

bool parse_real(const std::string& v, double& out) {
    if (v.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(v.c_str(), &end);
    return errno == 0 && end == v.c_str() + v.size() && std::isfinite(out);
}

void check_value(const std::string& source, std::size_t line, const ParamSpec& p, const std::string& v) {
    auto bounded = [&](double x) {
        if (x < p.min || x > p.max) {
            std::ostringstream os;
            os << "'" << p.key << "' = " << v << " outside [" << p.min << ", " << p.max << "]";
            throw ConfigError(source, line, os.str());
        }
    };
    switch (p.type) {
        case ParamType::integer: {
            std::int64_t x = 0;
            if (!parse_int(v, x)) throw ConfigError(source, line, "'" + p.key + "' expects an integer, got '" + v + "'");
            bounded(static_cast<double>(x));
            break;
        }
        case ParamType::real: {
            double x = 0;
            if (!parse_real(v, x)) throw ConfigError(source, line, "'" + p.key + "' expects a number, got '" + v + "'");
            bounded(x);
            break;
        }
        case ParamType::text:
            if (!p.choices.empty()) {
                bool ok = false;
                std::string all;
                for (const auto& c : p.choices) {
                    ok = ok || c == v;
                    all += (all.empty() ? "" : ", ") + c;
                }
                if (!ok) throw ConfigError(source, line, "'" + p.key + "' must be one of " + all + ", got '" + v + "'");
            }
            break;
        case ParamType::real_list:
        case ParamType::integer_list: {
            const auto items = split_list(v, ',');
            if (items.empty()) throw ConfigError(source, line, "'" + p.key + "' expects a comma-separated list");
            for (const auto& it : items) {
                if (p.type == ParamType::integer_list) {
                    std::int64_t x = 0;
                    if (!parse_int(it, x)) {
                        throw ConfigError(source, line, "'" + p.key + "' expects integers, got '" + it + "'");
                    }
                    bounded(static_cast<double>(x));
                } else {
                    double x = 0;
                    if (!parse_real(it, x)) {
                        throw ConfigError(source, line, "'" + p.key + "' expects numbers, got '" + it + "'");
                    }
                }
            }
            break;
        }
    }
}

}  // namespace

const std::vector<ExperimentSchema>& experiment_schemas() {
    static const std::vector<ExperimentSchema> schemas = build_schemas();
    return schemas;
}

const ExperimentSchema& schema_for(const std::string& experiment) {
    for (const auto& s : experiment_schemas()) {
        if (s.name == experiment) return s;
    }
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

const std::string& RunConfig::text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::out_of_range("config key '" + key + "' is not set");
    return it->second;
}

double RunConfig::real(const std::string& key) const {
    double x = 0;
    if (!parse_real(text(key), x)) throw std::invalid_argument("config key '" + key + "' is not a number");
    return x;
}

std::int64_t RunConfig::integer(const std::string& key) const {
    std::int64_t x = 0;
    if (!parse_int(text(key), x)) throw std::invalid_argument("config key '" + key + "' is not an integer");
    return x;
}

std::size_t RunConfig::count(const std::string& key) const {
    const auto v = integer(key);
    if (v < 0) throw std::invalid_argument("config key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

std::vector<double> RunConfig::reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& it : split_list(text(key), ',')) {
        double x = 0;
        if (!parse_real(it, x)) throw std::invalid_argument("config key '" + key + "' holds a non-number");
        out.push_back(x);
    }
    return out;
}

std::vector<std::int64_t> RunConfig::integers(const std::string& key) const {
    std::vector<std::int64_t> out;
    for (const auto& it : split_list(text(key), ',')) {
        std::int64_t x = 0;
        if (!parse_int(it, x)) throw std::invalid_argument("config key '" + key + "' holds a non-integer");
        out.push_back(x);
    }
    return out;
}

std::string RunConfig::canonical() const {
    std::string out = "experiment=" + experiment + "\nseed=" + std::to_string(seed) + "\n";
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

RunConfig validate_config(const RawConfig& raw) {
    auto exp = raw.entries.find("experiment");
    if (exp == raw.entries.end()) throw ConfigError(raw.source, 0, "missing required key 'experiment'");
    const ExperimentSchema* schema = nullptr;
    for (const auto& s : experiment_schemas()) {
        if (s.name == exp->second.value) schema = &s;
    }
    if (!schema) {
        std::string all;
        for (const auto& s : experiment_schemas()) all += (all.empty() ? "" : ", ") + s.name;
        throw ConfigError(raw.source, exp->second.line,
                          "unknown experiment '" + exp->second.value + "' (expected one of " + all + ")");
    }
    RunConfig cfg;
    cfg.experiment = schema->name;
    for (const auto& [key, entry] : raw.entries) {
        if (key == "experiment") continue;
        if (key == "seed") {
            std::uint64_t s = 0;
            const char* b = entry.value.data();
            const char* e = b + entry.value.size();
            auto [ptr, ec] = std::from_chars(b, e, s);
            if (ec != std::errc() || ptr != e) {
                throw ConfigError(raw.source, entry.line, "'seed' expects a non-negative integer, got '" + entry.value + "'");
            }
            cfg.seed = s;
            continue;
        }
        const ParamSpec* spec = nullptr;
        for (const auto& p : schema->params) {
            if (p.key == key) spec = &p;
        }
        if (!spec) {
            throw ConfigError(raw.source, entry.line,
                              "unknown key '" + key + "' for experiment '" + schema->name + "'");
        }
        check_value(raw.source, entry.line, *spec, entry.value);
        cfg.set(key, entry.value);
    }
    for (const auto& p : schema->params) {
        if (!cfg.has(p.key)) cfg.set(p.key, p.default_value);
    }
    return cfg;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace roughlab
