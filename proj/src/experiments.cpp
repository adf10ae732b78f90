#include "roughlab/experiments.hpp"

#include "roughlab/bell.hpp"
#include "roughlab/controlled.hpp"
#include "roughlab/csv.hpp"
#include "roughlab/gauss.hpp"
#include "roughlab/integrate.hpp"
#include "roughlab/market.hpp"
#include "roughlab/rde.hpp"
#include "roughlab/roughpath.hpp"
#include "roughlab/stats.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace roughlab {

namespace fs = std::filesystem;

namespace {

class Artifacts {
  public:
    Artifacts(fs::path dir, RunOutcome& outcome) : dir_(std::move(dir)), outcome_(outcome) {}

    std::ofstream open(const std::string& name) {
        std::ofstream os(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
        outcome_.artifacts.push_back(name);
        return os;
    }

  private:
    fs::path dir_;
    RunOutcome& outcome_;
};

NoiseModel noise_model(const RunConfig& cfg, const std::string& key = "noise") {
    const std::string& kind = cfg.text(key);
    if (kind == "bm") return NoiseModel::bm();
    if (kind == "fbm") return NoiseModel::fbm(cfg.real("H"));
    if (kind == "ou") return NoiseModel::ou(cfg.real("theta"), cfg.real("sigma"));
    if (kind == "time_changed_bm") return NoiseModel::time_changed_bm(cfg.real("clock_power"));
    throw ConfigError(key, 0, "unsupported noise '" + kind + "'");
}

LiftKind lift_kind(const RunConfig& cfg) {
    const std::string& l = cfg.text("lift");
    if (l == "hermite") return LiftKind::hermite;
    if (l == "geometric") return LiftKind::geometric;
    return LiftKind::ito;
}

RoughPath1D make_lift(LiftKind kind, const SampledPath& X, const VarianceFunction& V, double alpha) {
    switch (kind) {
        case LiftKind::hermite: return hermite_lift(X, V, alpha);
        case LiftKind::geometric: return geometric_lift(X, alpha);
        default: return ito_lift(X, alpha);
    }
}

Grid grid_of(const RunConfig& cfg) { return Grid(cfg.real("T"), cfg.count("N")); }

std::string fmt(double v) { return format_double(v); }

int run_lift(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
    const Grid grid = grid_of(cfg);
    const NoiseModel noise = noise_model(cfg);
    const double alpha = cfg.real("alpha");
    const SampledPath X = simulate_noise(noise, grid, cfg.seed, 0);
    const RoughPath1D rp = make_lift(lift_kind(cfg), X, variance_fn(noise, grid), alpha);
    {
        auto os = art.open("path.csv");
        write_path_csv(os, X);
    }
    {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        const std::size_t stride = std::max<std::size_t>(1, grid.N / 16);
        for (std::size_t s = 0; s <= grid.N; s += stride) {
            for (std::size_t t = s; t <= grid.N; t += stride) pairs.emplace_back(s, t);
        }
        auto os = art.open("levels.csv");
        write_levels_csv(os, rp, pairs);
    }
    const ChenReport chen = chen_residual(rp, cfg.count("chen_triples"), cfg.seed);
    double roundtrip = 0.0;
    bool extracted = true;
    try {
        const RenormTerms F = extract_renorm(accessor(rp), alpha);
        for (int m = 2; m <= rp.k(); ++m) {
            for (std::size_t i = 0; i <= grid.N; ++i) {
                roundtrip = std::max(roundtrip, std::abs(F.at(m, i) - rp.renorm().at(m, i)));
            }
        }
        auto os = art.open("renorm.csv");
        write_renorm_csv(os, F);
    } catch (const ChenViolation& e) {
        extracted = false;
        log << e.what() << '\n';
    }
    const bool pass = extracted && chen.relative() <= 1e-10 && roundtrip <= 1e-10;
    auto os = art.open("summary.csv");
    os << "k,alpha,chen_relative,roundtrip_error,pass\n"
       << rp.k() << ',' << fmt(alpha) << ',' << fmt(chen.relative()) << ',' << fmt(roundtrip) << ','
       << (pass ? 1 : 0) << '\n';
    log << "lift: k=" << rp.k() << " chen=" << chen.relative() << " roundtrip=" << roundtrip << '\n';
    return pass ? kExitOk : kExitRejected;
}

int run_integrate(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
    const Grid grid = grid_of(cfg);
    const NoiseModel noise = noise_model(cfg);
    const double alpha = cfg.real("alpha");
    std::vector<std::size_t> meshes;
    for (auto m : cfg.integers("meshes")) {
        if (m < 1 || grid.N % static_cast<std::size_t>(m) != 0) {
            throw ConfigError("meshes", 0, "stride " + std::to_string(m) + " does not divide N");
        }
        meshes.push_back(static_cast<std::size_t>(m));
    }
    const SampledPath X = simulate_noise(noise, grid, cfg.seed, cfg.count("path_index"));
    const RoughPath1D rp = make_lift(lift_kind(cfg), X, variance_fn(noise, grid), alpha);
    const ControlledPath cp = polynomial_controlled(cfg.reals("polynomial"), rp);
    const IntegralResult r = rough_integral(cp, rp, 0, grid.N, meshes);
    {
        auto os = art.open("refinement.csv");
        write_refinement_csv(os, r, grid.dt());
    }
    {
        auto os = art.open("controlled.csv");
        write_controlled_csv(os, cp);
    }
    const double expected = (rp.k() + 1) * alpha - 1.0;
    auto os = art.open("summary.csv");
    os << "value,rate_estimate,expected_rate,converged\n"
       << fmt(r.value) << ',' << fmt(r.rate_estimate) << ',' << fmt(expected) << ',' << (r.converged ? 1 : 0) << '\n';
    log << "integrate: value=" << r.value << " rate=" << r.rate_estimate << '\n';
    return kExitOk;
}

DerivativeTable function_table(const std::string& name) {
    if (name == "x2") return polynomial_function({0, 0, 1});
    if (name == "x3") return polynomial_function({0, 0, 0, 1});
    if (name == "exp") return exponential_function();
    return sine_function();
}

int run_ito(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
    const Grid grid = grid_of(cfg);
    const NoiseModel noise = noise_model(cfg);
    const VarianceFunction V = variance_fn(noise, grid);
    const DerivativeTable F = function_table(cfg.text("function"));
    const std::size_t paths = cfg.count("paths");
    std::vector<double> sup(paths, 0.0);
    for (std::size_t p = 0; p < paths; ++p) {
        const RoughPath1D rp = make_lift(lift_kind(cfg), simulate_noise(noise, grid, cfg.seed, p), V, cfg.real("alpha"));
        const auto res = ito_residual(F, rp);
        for (double v : res) sup[p] = std::max(sup[p], std::abs(v));
        if (p == 0) {
            auto os = art.open("ito.csv");
            write_csv_header(os, {"t", "residual"});
            for (std::size_t i = 0; i <= grid.N; ++i) write_csv_row(os, {grid.time(i), res[i]});
        }
    }
    auto os = art.open("summary.csv");
    os << "path,sup_residual\n";
    for (std::size_t p = 0; p < paths; ++p) os << p << ',' << fmt(sup[p]) << '\n';
    log << "ito: max sup residual " << *std::max_element(sup.begin(), sup.end()) << '\n';
    return kExitOk;
}

std::vector<double> numbers_in(const std::string& body, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split_list(body, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size()) throw ConfigError("integrands", 0, "bad number '" + item + "' in " + what);
        out.push_back(v);
    }
    return out;
}

std::vector<IntegrandSpec> parse_integrands(const std::string& text) {
    std::vector<IntegrandSpec> out;
    for (const auto& item : split_list(text, ';')) {
        const auto open = item.find('(');
        if (open == std::string::npos || item.back() != ')') {
            throw ConfigError("integrands", 0, "expected name(args), got '" + item + "'");
        }
        const std::string name = trim(item.substr(0, open));
        const auto args = numbers_in(item.substr(open + 1, item.size() - open - 2), item);
        if (name == "poly") {
            if (args.empty()) throw ConfigError("integrands", 0, "poly needs coefficients");
            out.push_back(IntegrandSpec::polynomial(args));
        } else if (name == "sig") {
            if (args.size() != 2 || args[0] != std::floor(args[0])) {
                throw ConfigError("integrands", 0, "sig expects (n, s) with integer n, got '" + item + "'");
            }
            out.push_back(IntegrandSpec::signature(static_cast<int>(args[0]), args[1]));
        } else if (name == "simple") {
            if (args.size() != 2) throw ConfigError("integrands", 0, "simple expects (s, u), got '" + item + "'");
            out.push_back(IntegrandSpec::simple(args[0], args[1]));
        } else {
            throw ConfigError("integrands", 0, "unknown integrand '" + name + "'");
        }
    }
    return out;
}

std::vector<StoppingSpec> parse_stoppings(const std::string& text) {
    std::vector<StoppingSpec> out;
    for (const auto& item : split_list(text, ';')) {
        if (item == "T") {
            out.push_back(StoppingSpec::terminal());
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("stoppings", 0, "expected T, t=<time> or clock=<level>");
        const std::string key = trim(item.substr(0, eq));
        const auto v = numbers_in(item.substr(eq + 1), item);
        if (v.size() != 1) throw ConfigError("stoppings", 0, "one value expected in '" + item + "'");
        if (key == "t") {
            out.push_back(StoppingSpec::fixed(v[0]));
        } else if (key == "clock") {
            out.push_back(StoppingSpec::clock(v[0]));
        } else {
            throw ConfigError("stoppings", 0, "unknown stopping '" + key + "'");
        }
    }
    return out;
}

int run_mc(const RunConfig& cfg, Artifacts& art, std::ostream& log, std::size_t workers) {
    ExperimentSpec spec;
    spec.noise = noise_model(cfg);
    spec.lift = lift_kind(cfg);
    spec.alpha = cfg.real("alpha");
    spec.T = cfg.real("T");
    spec.N = cfg.count("N");
    spec.M = cfg.count("M");
    spec.seed = cfg.seed;
    spec.workers = workers;
    spec.integrands = parse_integrands(cfg.text("integrands"));
    spec.stoppings = parse_stoppings(cfg.text("stoppings"));
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("mc-unbiased", 0, e.what());
    }
    const auto rows = unbiasedness_report(spec);
    auto os = art.open("report.csv");
    write_report_csv(os, rows);
    bool all = true;
    for (const auto& r : rows) {
        all = all && r.pass;
        log << r.integrand << " @ " << r.stopping << ": " << r.est.mean << " +- " << r.est.std_error
            << (r.pass ? "" : "  rejected") << '\n';
    }
    return all ? kExitOk : kExitRejected;
}

int run_balance(const RunConfig& cfg, Artifacts& art, std::ostream& log, std::size_t workers) {
    const std::string& kind = cfg.text("process");
    const BalancingProcess proc = kind == "sarmanov" ? BalancingProcess::pairs(SarmanovSpec::standard(cfg.real("epsilon")))
                                                     : BalancingProcess::gaussian(noise_model(cfg, "process"));
    const double s = cfg.real("s"), u = cfg.real("u"), t = cfg.real("t");
    if (!(s <= u && u <= t)) throw ConfigError("balance", 0, "need s <= u <= t");
    if (kind == "sarmanov") {
        try {
            check_sarmanov(proc.sarmanov);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("epsilon", 0, e.what());
        }
    }
    auto os = art.open("balance.csv");
    os << "process,n,s,u,t,mean,se,n_samples,pass\n";
    bool all = true;
    for (auto n : cfg.integers("levels")) {
        const MCEstimate e = balancing_residual(proc, static_cast<int>(n), s, u, t, cfg.count("M"), cfg.seed, workers);
        const bool pass = e.consistent_with(0.0);
        all = all && pass;
        os << kind << ',' << n << ',' << fmt(s) << ',' << fmt(u) << ',' << fmt(t) << ',' << fmt(e.mean) << ','
           << fmt(e.std_error) << ',' << e.n_samples << ',' << (pass ? 1 : 0) << '\n';
        log << "n=" << n << ": " << e.mean << " +- " << e.std_error << (pass ? "" : "  rejected") << '\n';
    }
    return all ? kExitOk : kExitRejected;
}

int run_sarmanov(const RunConfig& cfg, Artifacts& art, std::ostream& log, std::size_t workers) {
    const SarmanovSpec spec = SarmanovSpec::standard(cfg.real("epsilon"));
    try {
        check_sarmanov(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("epsilon", 0, e.what());
    }
    const std::size_t M = cfg.count("M");
    const SarmanovSample sample = sarmanov_sample(spec, M, cfg.seed, workers);
    if (cfg.integer("write_samples") == 1) {
        auto os = art.open("samples.csv");
        write_csv_header(os, {"x", "y"});
        for (std::size_t i = 0; i < M; ++i) write_csv_row(os, {sample.x[i], sample.y[i]});
    }
    const double level = cfg.real("ks_level");
    std::vector<double> sum(M), asym(M);
    for (std::size_t i = 0; i < M; ++i) {
        sum[i] = sample.x[i] + sample.y[i];
        asym[i] = spec.h(sample.x[i]) * spec.g(sample.y[i]) - spec.h(sample.y[i]) * spec.g(sample.x[i]);
    }
    auto os = art.open("sarmanov.csv");
    os << "test,statistic,reference,se,p_value,pass\n";
    bool all = true;
    auto ks_row = [&](const std::string& name, std::span<const double> v, double var) {
        const KsResult r = ks_normal(v, var);
        const bool pass = r.p_value >= level;
        all = all && pass;
        os << name << ',' << fmt(r.statistic) << ",0,0," << fmt(r.p_value) << ',' << (pass ? 1 : 0) << '\n';
    };
    ks_row("ks_x", sample.x, 1.0);
    ks_row("ks_y", sample.y, 1.0);
    ks_row("ks_sum", sum, 2.0);
    for (auto n : cfg.integers("levels")) {
        std::vector<double> v(M);
        for (std::size_t i = 0; i < M; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= n; ++j) {
                acc += hermite_eval(j, sample.x[i], -0.5) * hermite_eval(static_cast<int>(n) - j, sample.y[i], -0.5);
            }
            v[i] = acc;
        }
        const MCEstimate e = estimate(v);
        const bool pass = e.consistent_with(0.0);
        all = all && pass;
        os << "balance_n" << n << ',' << fmt(e.mean) << ",0," << fmt(e.std_error) << ",0," << (pass ? 1 : 0) << '\n';
    }
    const MCEstimate a = estimate(asym);
    const bool rejected = !a.consistent_with(0.0);
    os << "asymmetry," << fmt(a.mean) << ',' << fmt(sarmanov_asymmetry(spec)) << ',' << fmt(a.std_error) << ",0,"
       << (rejected ? 1 : 0) << '\n';
    log << "sarmanov: acceptance " << sample.acceptance_rate << ", asymmetry " << a.mean << " +- " << a.std_error
        << '\n';
    return all ? kExitOk : kExitRejected;
}

int run_rde(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
    std::vector<std::size_t> Ns;
    for (auto n : cfg.integers("Ns")) Ns.push_back(static_cast<std::size_t>(n));
    std::sort(Ns.begin(), Ns.end());
    const std::size_t Nmax = Ns.back();
    for (auto n : Ns) {
        if (Nmax % n != 0) throw ConfigError("Ns", 0, "every grid size must divide the largest");
    }
    const double T = cfg.real("T");
    const double scale = cfg.real("scale");
    const double y0 = cfg.real("y0");
    const std::size_t paths = cfg.count("paths");
    const Grid fine(T, Nmax);
    const VectorField field = linear_field(scale);
    std::vector<double> err_sum(Ns.size(), 0.0);
    std::vector<std::vector<double>> errors(Ns.size(), std::vector<double>(paths));
    for (std::size_t p = 0; p < paths; ++p) {
        const SampledPath B = simulate_bm(fine, cfg.seed, p);
        const double exact = y0 * std::exp(scale * B(Nmax) - 0.5 * scale * scale * T);
        for (std::size_t j = 0; j < Ns.size(); ++j) {
            const SampledPath X = B.subsample(Nmax / Ns[j]);
            const RoughPathL2 driver = to_level2(hermite_lift(X, variance_fn(NoiseModel::bm(), X.grid), 0.4));
            const RdeSolution sol = solve_rde_davie(field, {y0}, driver);
            errors[j][p] = std::abs(sol.path.y(Ns[j], 0) - exact);
            if (p == 0 && j + 1 == Ns.size()) {
                auto os = art.open("rde.csv");
                write_rde_csv(os, sol);
            }
        }
    }
    std::vector<double> h, e;
    auto os = art.open("convergence.csv");
    os << "N,dt,strong_error\n";
    for (std::size_t j = 0; j < Ns.size(); ++j) {
        const double mean = pairwise_sum(errors[j]) / static_cast<double>(paths);
        h.push_back(T / static_cast<double>(Ns[j]));
        e.push_back(mean);
        os << Ns[j] << ',' << fmt(h.back()) << ',' << fmt(mean) << '\n';
    }
    const double order = Ns.size() > 1 ? fit_rate(h, e) : 0.0;
    log << "rde: strong order " << order << '\n';
    auto ss = art.open("summary.csv");
    ss << "strong_order\n" << fmt(order) << '\n';
    return kExitOk;
}

Scheme scheme_of(const std::string& s) {
    if (s == "ito") return Scheme::ito;
    if (s == "stratonovich") return Scheme::stratonovich;
    return Scheme::young;
}

int run_arbitrage(const RunConfig& cfg, Artifacts& art, std::ostream& log, std::size_t workers) {
    ArbitrageBatchSpec spec;
    spec.paths = cfg.count("paths");
    spec.N = cfg.count("N");
    spec.refinement = cfg.count("refinement");
    spec.d = cfg.count("d");
    spec.H = cfg.real("H");
    spec.sigma = cfg.real("sigma");
    spec.T = cfg.real("T");
    spec.p = cfg.real("p");
    spec.q = cfg.real("q");
    spec.scheme = scheme_of(cfg.text("scheme"));
    spec.seed = cfg.seed;
    spec.workers = workers;
    if (!(spec.p < spec.q) || spec.p == 0.0 || spec.q == 0.0) {
        throw ConfigError("arbitrage", 0, "need non-zero p < q");
    }
    const ArbitrageBatch batch = arbitrage_batch(spec);
    {
        auto os = art.open("summary.csv");
        write_arbitrage_summary_csv(os, batch);
    }
    {
        const RoughMarket market = exponential_fbm_market(Grid(spec.T, spec.N), spec.refinement, spec.d, spec.H,
                                                          spec.sigma, spec.scheme, spec.seed, 0);
        auto os = art.open("market.csv");
        write_market_csv(os, market, batch.reports[0].spread, batch.reports[0].gain);
    }
    const std::size_t live = spec.paths - batch.degenerate;
    log << "arbitrage: " << batch.claims << " of " << live << " non-degenerate paths support the claim; "
        << "self-financing residual in [" << batch.min_residual << ", " << batch.max_residual << "]\n";
    return batch.claims == live ? kExitOk : kExitRejected;
}

int run_clock(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
    const Grid grid = grid_of(cfg);
    const double power = cfg.real("power");
    const SampledPath X = simulate_bm(grid, cfg.seed, 0);
    RenormTerms G(2, grid, true);
    for (std::size_t i = 0; i <= grid.N; ++i) G.G[0][i] = std::pow(grid.time(i), power);
    const RoughPath1D rp = lift_from_renorm(X, G, 0.45);
    const double horizon = cfg.real("level_fraction") * G.G[0].back();
    const Grid clock_grid(horizon, cfg.count("clock_N"));
    const ClockChange cc = clock_time_change(rp, clock_grid);
    const RenormTerms F = extract_renorm(accessor(cc.path), 0.45);
    double step = 0.0;
    for (std::size_t i = 1; i <= grid.N; ++i) step = std::max(step, G.G[0][i] - G.G[0][i - 1]);
    double worst = 0.0;
    auto os = art.open("clock.csv");
    os << "t,tau,G2,error\n";
    for (std::size_t j = 0; j <= clock_grid.N; ++j) {
        const double err = std::abs(F.at(2, j) - clock_grid.time(j));
        worst = std::max(worst, err);
        os << fmt(clock_grid.time(j)) << ',' << fmt(grid.time(cc.source[j])) << ',' << fmt(F.at(2, j)) << ','
           << fmt(err) << '\n';
    }
    auto ss = art.open("summary.csv");
    ss << "max_error,one_step,max_time_rounding,pass\n"
       << fmt(worst) << ',' << fmt(step) << ',' << fmt(cc.max_rounding) << ',' << (worst <= step ? 1 : 0) << '\n';
    log << "clock: max |G~2 - t| = " << worst << " (one step of G2 = " << step << ")\n";
    return worst <= step ? kExitOk : kExitRejected;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg, const fs::path& out, std::size_t workers, std::ostream& log) {
    RunOutcome outcome;
    Artifacts art(out, outcome);
    const std::string& e = cfg.experiment;
    if (e == "lift") outcome.exit_code = run_lift(cfg, art, log);
    else if (e == "integrate") outcome.exit_code = run_integrate(cfg, art, log);
    else if (e == "ito") outcome.exit_code = run_ito(cfg, art, log);
    else if (e == "mc-unbiased") outcome.exit_code = run_mc(cfg, art, log, workers);
    else if (e == "balance") outcome.exit_code = run_balance(cfg, art, log, workers);
    else if (e == "sarmanov") outcome.exit_code = run_sarmanov(cfg, art, log, workers);
    else if (e == "rde") outcome.exit_code = run_rde(cfg, art, log);
    else if (e == "arbitrage") outcome.exit_code = run_arbitrage(cfg, art, log, workers);
    else if (e == "clock") outcome.exit_code = run_clock(cfg, art, log);
    else throw ConfigError("experiment", 0, "unknown experiment '" + e + "'");
    return outcome;
}

int run(const RunOptions& options, std::ostream& log, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg;
    try {
        cfg = validate_config(parse_config_file(options.config_path));
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (options.seed) cfg.seed = *options.seed;

    fs::path out = options.out_dir;
    if (out.empty()) {
        const char* env = std::getenv("ROUGHLAB_OUT");
        out = env && *env ? fs::path(env) : fs::path("roughlab-out");
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        err << "cannot create output directory " << out << ": " << ec.message() << '\n';
        return kExitError;
    }

    RunOutcome outcome;
    try {
        outcome = run_experiment(cfg, out, options.workers, log);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        outcome.exit_code = kExitError;
        outcome.summary = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::ordered_json manifest;
    manifest["experiment"] = cfg.experiment;
    manifest["config_hash"] = hex64(fnv1a64(cfg.canonical()));
    manifest["seed"] = cfg.seed;
    manifest["workers"] = options.workers;
    nlohmann::ordered_json versions;
    versions["roughlab"] = kVersion;
    versions["compiler"] = __VERSION__;
    versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
    versions["boost"] = BOOST_LIB_VERSION;
    versions["fftw"] = std::string(fftw_version);
    manifest["versions"] = versions;
    manifest["wall_time_seconds"] = wall;
    manifest["exit_code"] = outcome.exit_code;
    manifest["artifacts"] = outcome.artifacts;
    if (!outcome.summary.empty()) manifest["error"] = outcome.summary;
    std::ofstream mf(out / "manifest.json");
    mf << manifest.dump(2) << '\n';
    if (!mf) {
        err << "cannot write manifest\n";
        return kExitError;
    }
    return outcome.exit_code;
}

std::string list_experiments() {
    std::ostringstream os;
    for (const auto& s : experiment_schemas()) os << s.name << ": " << s.description << '\n';
    return os.str();
}

}  // namespace roughlab
