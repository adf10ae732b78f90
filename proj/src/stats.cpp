#include "roughlab/stats.hpp"

#include "roughlab/bell.hpp"
#include "roughlab/controlled.hpp"
#include "roughlab/csv.hpp"
#include "roughlab/integrate.hpp"
#include "roughlab/market.hpp"
#include "roughlab/parallel.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roughlab {

bool MCEstimate::consistent_with(double target, double z) const {
    return std::abs(mean - target) <= z * std_error;
}

MCEstimate estimate(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("estimate: need at least two samples");
    MCEstimate e;
    e.n_samples = samples.size();
    const double n = static_cast<double>(samples.size());
    e.mean = pairwise_sum(samples) / n;
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = samples[i] - e.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    e.std_error = std::sqrt(var / n);
    e.ci_low = e.mean - 1.96 * e.std_error;
    e.ci_high = e.mean + 1.96 * e.std_error;
    return e;
}

std::string lift_name(LiftKind lift) {
    switch (lift) {
        case LiftKind::hermite: return "hermite";
        case LiftKind::geometric: return "geometric";
        case LiftKind::ito: return "ito";
        case LiftKind::custom: return "custom";
    }
    return "unknown";
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

IntegrandSpec IntegrandSpec::polynomial(std::vector<double> c, std::string label) {
    IntegrandSpec s;
    s.kind = Kind::polynomial;
    s.coefficients = std::move(c);
    s.name = std::move(label);
    return s;
}

IntegrandSpec IntegrandSpec::signature(int level, double start) {
    IntegrandSpec s;
    s.kind = Kind::signature;
    s.n = level;
    s.s = start;
    return s;
}

IntegrandSpec IntegrandSpec::simple(double start, double end) {
    IntegrandSpec s;
    s.kind = Kind::simple;
    s.s = start;
    s.u = end;
    return s;
}

std::string IntegrandSpec::label() const {
    if (!name.empty()) return name;
    switch (kind) {
        case Kind::polynomial: {
            std::string out = "poly[";
            for (std::size_t i = 0; i < coefficients.size(); ++i) {
                if (i) out += ";";
                out += num(coefficients[i]);
            }
            return out + "]";
        }
        case Kind::signature: return "sig(n=" + std::to_string(n) + ";s=" + num(s) + ")";
        case Kind::simple: return "simple(tanh;" + num(s) + ";" + num(u) + ")";
    }
    return "unknown";
}

std::string StoppingSpec::label() const {
    switch (kind) {
        case Kind::terminal: return "T";
        case Kind::fixed: return "t=" + num(value);
        case Kind::clock: return "clock=" + num(value);
    }
    return "unknown";
}

void validate(const ExperimentSpec& spec) {
    if (!(spec.T > 0.0) || !std::isfinite(spec.T)) throw std::invalid_argument("T must be positive");
    if (spec.N < 2) throw std::invalid_argument("N must be at least 2");
    if (spec.M < 1000) throw std::invalid_argument("M must be at least 1000");
    if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (spec.noise.kind == NoiseKind::tabulated) {
        throw std::invalid_argument("noise: tabulated variance has no simulator");
    }
    if (spec.noise.kind == NoiseKind::fbm && !(spec.noise.H > 0.0 && spec.noise.H < 1.0)) {
        throw std::invalid_argument("noise: Hurst index must lie in (0, 1)");
    }
    if (spec.lift == LiftKind::custom && !spec.custom_renorm) {
        throw std::invalid_argument("lift: custom lift needs a renormalisation function");
    }
    if (spec.integrands.empty()) throw std::invalid_argument("integrands: at least one is required");
    const Grid grid(spec.T, spec.N);
    for (const auto& h : spec.integrands) {
        switch (h.kind) {
            case IntegrandSpec::Kind::polynomial:
                if (h.coefficients.empty()) throw std::invalid_argument("integrand " + h.label() + ": no coefficients");
                break;
            case IntegrandSpec::Kind::signature:
                if (h.n < 0 || h.n + 1 > kMaxBellIndex) {
                    throw std::invalid_argument("integrand " + h.label() + ": level out of range");
                }
                grid.index_of(h.s);
                if (h.n == 0 && h.s > 0.0) {
                    throw std::invalid_argument("integrand " + h.label() +
                                                ": level 0 started after 0 jumps; use a simple integrand");
                }
                break;
            case IntegrandSpec::Kind::simple:
                grid.index_of(h.s);
                grid.index_of(h.u);
                if (h.s > h.u) throw std::invalid_argument("integrand " + h.label() + ": window out of order");
                break;
        }
    }
    if (spec.stoppings.empty()) throw std::invalid_argument("stoppings: at least one is required");
    for (const auto& st : spec.stoppings) {
        if (st.kind == StoppingSpec::Kind::fixed) {
            if (st.value < 0.0 || st.value > spec.T) throw std::invalid_argument("stopping " + st.label() + ": outside [0, T]");
            grid.index_of(st.value);
        }
        if (st.kind == StoppingSpec::Kind::clock && !(st.value >= 0.0)) {
            throw std::invalid_argument("stopping " + st.label() + ": clock level must be non-negative");
        }
    }
}

namespace {

struct CellTable {
    std::size_t cells = 0;
    std::vector<double> values;  // M x cells
    std::vector<unsigned char> ok;
};

RoughPath1D make_lift(const ExperimentSpec& spec, const SampledPath& X, const VarianceFunction& V) {
    switch (spec.lift) {
        case LiftKind::hermite: return hermite_lift(X, V, spec.alpha);
        case LiftKind::geometric: return geometric_lift(X, spec.alpha);
        case LiftKind::ito: return ito_lift(X, spec.alpha);
        case LiftKind::custom: return lift_from_renorm(X, spec.custom_renorm(X), spec.alpha);
    }
    throw std::invalid_argument("unknown lift");
}

std::size_t stopping_index(const StoppingSpec& st, const RoughPath1D& rp) {
    const Grid& grid = rp.grid();
    switch (st.kind) {
        case StoppingSpec::Kind::terminal: return grid.N;
        case StoppingSpec::Kind::fixed: return grid.index_of(st.value);
        case StoppingSpec::Kind::clock: {
            if (rp.k() < 2) throw std::runtime_error("clock stopping needs a level-2 renormalisation");
            std::vector<double> clock(grid.N + 1);
            for (std::size_t i = 0; i <= grid.N; ++i) clock[i] = -2.0 * rp.renorm().at(2, i);
            return renorm_clock(clock, grid, st.value).first_above;
        }
    }
    return grid.N;
}

void evaluate_path(const ExperimentSpec& spec, const RoughPath1D& rp, std::span<double> out,
                   std::span<unsigned char> ok) {
    const Grid& grid = rp.grid();
    const std::size_t nstop = spec.stoppings.size();
    int max_level = rp.k();
    for (const auto& h : spec.integrands) {
        if (h.kind == IntegrandSpec::Kind::signature) max_level = std::max(max_level, h.n + 1);
    }
    const StepLevels L = step_levels(rp, max_level);
    std::vector<std::size_t> taus(nstop, 0);
    std::vector<unsigned char> tau_ok(nstop, 1);
    for (std::size_t j = 0; j < nstop; ++j) {
        try {
            taus[j] = stopping_index(spec.stoppings[j], rp);
        } catch (const std::exception&) {
            tau_ok[j] = 0;
        }
    }
    for (std::size_t i = 0; i < spec.integrands.size(); ++i) {
        const auto& h = spec.integrands[i];
        auto cell = [&](std::size_t j, auto&& fn) {
            const std::size_t c = i * nstop + j;
            if (!tau_ok[j]) return;
            try {
                const double v = fn(taus[j]);
                out[c] = v;
                ok[c] = std::isfinite(v) ? 1 : 0;
            } catch (const std::exception&) {
                ok[c] = 0;
            }
        };
        try {
            switch (h.kind) {
                case IntegrandSpec::Kind::polynomial: {
                    const ControlledPath cp = polynomial_controlled(h.coefficients, rp);
                    for (std::size_t j = 0; j < nstop; ++j) {
                        cell(j, [&](std::size_t tau) { return compensated_sum(cp, L, 0, tau); });
                    }
                    break;
                }
                case IntegrandSpec::Kind::signature: {
                    const auto pw = signature_integrand_at(rp, h.n, grid.index_of(h.s));
                    for (std::size_t j = 0; j < nstop; ++j) {
                        cell(j, [&](std::size_t tau) { return compensated_sum(pw, L, 0, tau); });
                    }
                    break;
                }
                case IntegrandSpec::Kind::simple: {
                    const std::size_t s = grid.index_of(h.s);
                    const SimpleIntegrand si{std::tanh(rp.x(s)), s, grid.index_of(h.u)};
                    for (std::size_t j = 0; j < nstop; ++j) {
                        cell(j, [&](std::size_t tau) { return simple_integral(si, rp.path(), 0, tau); });
                    }
                    break;
                }
            }
        } catch (const std::exception&) {
        }
    }
}

CellTable run_cells(const ExperimentSpec& spec) {
    validate(spec);
    const Grid grid(spec.T, spec.N);
    const VarianceFunction V = variance_fn(spec.noise, grid);
    CellTable table;
    table.cells = spec.integrands.size() * spec.stoppings.size();
    table.values.assign(spec.M * table.cells, 0.0);
    table.ok.assign(spec.M * table.cells, 0);
    parallel_blocks(spec.M, kFbmBlock, spec.workers, [&](std::size_t begin, std::size_t end) {
        const auto paths = simulate_noise_batch(spec.noise, grid, spec.seed, begin, end - begin);
        for (std::size_t p = begin; p < end; ++p) {
            std::span<double> out(table.values.data() + p * table.cells, table.cells);
            std::span<unsigned char> ok(table.ok.data() + p * table.cells, table.cells);
            try {
                const RoughPath1D rp = make_lift(spec, paths[p - begin], V);
                evaluate_path(spec, rp, out, ok);
            } catch (const std::exception&) {
                std::fill(ok.begin(), ok.end(), 0);
            }
        }
    });
    return table;
}

std::pair<MCEstimate, std::size_t> reduce_cell(const ExperimentSpec& spec, const CellTable& table,
                                               std::size_t c) {
    std::vector<double> v;
    v.reserve(spec.M);
    std::size_t errors = 0;
    for (std::size_t p = 0; p < spec.M; ++p) {
        if (table.ok[p * table.cells + c]) {
            v.push_back(table.values[p * table.cells + c]);
        } else {
            ++errors;
        }
    }
    if (static_cast<double>(errors) > kMaxPathErrorRate * static_cast<double>(spec.M)) {
        const std::size_t i = c / spec.stoppings.size();
        const std::size_t j = c % spec.stoppings.size();
        throw std::runtime_error(std::to_string(errors) + " of " + std::to_string(spec.M) +
                                 " paths failed for integrand " + spec.integrands[i].label() +
                                 " stopped at " + spec.stoppings[j].label());
    }
    return {estimate(v), errors};
}

}  // namespace

MCEstimate mc_integral_mean(const ExperimentSpec& spec, std::size_t integrand, std::size_t stopping) {
    if (integrand >= spec.integrands.size() || stopping >= spec.stoppings.size()) {
        throw std::out_of_range("mc_integral_mean: cell index out of range");
    }
    ExperimentSpec one = spec;
    one.integrands = {spec.integrands[integrand]};
    one.stoppings = {spec.stoppings[stopping]};
    const CellTable table = run_cells(one);
    return reduce_cell(one, table, 0).first;
}

std::vector<ReportRow> unbiasedness_report(const ExperimentSpec& spec) {
    const CellTable table = run_cells(spec);
    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < spec.integrands.size(); ++i) {
        for (std::size_t j = 0; j < spec.stoppings.size(); ++j) {
            ReportRow r;
            r.noise = spec.noise.name();
            r.lift = lift_name(spec.lift);
            r.integrand = spec.integrands[i].label();
            r.stopping = spec.stoppings[j].label();
            std::tie(r.est, r.errors) = reduce_cell(spec, table, i * spec.stoppings.size() + j);
            r.pass = r.est.consistent_with(0.0);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows, bool header) {
    if (header) os << "noise,lift,integrand,stopping,mean,se,n,pass\n";
    for (const auto& r : rows) {
        os << r.noise << ',' << r.lift << ',' << r.integrand << ',' << r.stopping << ','
           << format_double(r.est.mean) << ',' << format_double(r.est.std_error) << ','
           << r.est.n_samples << ',' << (r.pass ? 1 : 0) << '\n';
    }
}

SarmanovSpec SarmanovSpec::standard(double epsilon) {
    SarmanovSpec s;
    s.epsilon = epsilon;
    s.h = [](double x) { return std::sin(x); };
    s.g = [](double x) { return std::sin(2.0 * x); };
    s.sup_h = 1.0;
    s.sup_g = 1.0;
    return s;
}

namespace {

double gaussian_expectation(const std::function<double(double)>& f) {
    boost::math::quadrature::sinh_sinh<double> integrator;
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return integrator.integrate([&](double x) {
        const double w = std::exp(-0.5 * x * x);
        return w == 0.0 ? 0.0 : c * w * f(x);
    });
}

}  // namespace

void check_sarmanov(const SarmanovSpec& spec) {
    if (!spec.h || !spec.g) throw std::invalid_argument("sarmanov: h and g are required");
    if (!(spec.sup_h > 0.0) || !(spec.sup_g > 0.0)) {
        throw std::invalid_argument("sarmanov: sup bounds must be positive");
    }
    if (!(2.0 * std::abs(spec.epsilon) * spec.sup_h * spec.sup_g < 1.0)) {
        throw std::invalid_argument("sarmanov: 2 |eps| sup|h| sup|g| must be below 1 for a positive density");
    }
    const double mh = gaussian_expectation(spec.h);
    const double mg = gaussian_expectation(spec.g);
    if (std::abs(mh) > 1e-9 || std::abs(mg) > 1e-9) {
        throw std::invalid_argument("sarmanov: h and g must have zero Gaussian mean (got " + num(mh) + ", " +
                                    num(mg) + ")");
    }
}

SarmanovSample sarmanov_sample(const SarmanovSpec& spec, std::size_t M, std::uint64_t seed,
                               std::size_t workers) {
    check_sarmanov(spec);
    const double bound = 2.0 * std::abs(spec.epsilon) * spec.sup_h * spec.sup_g;
    SarmanovSample out;
    out.x.resize(M);
    out.y.resize(M);
    std::vector<std::uint64_t> trials(M, 0);
    constexpr std::uint64_t kMaxTrials = 1000;
    parallel_blocks(M, 1024, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto engine = path_engine(seed, i);
            std::normal_distribution<double> normal;
            std::uniform_real_distribution<double> unif;
            for (std::uint64_t n = 1;; ++n) {
                const double x = normal(engine);
                const double y = normal(engine);
                const double w = 1.0 + spec.epsilon * (spec.h(x) * spec.g(y) - spec.h(y) * spec.g(x));
                if (!(w >= 0.0)) throw std::runtime_error("sarmanov: negative density; sup bounds are wrong");
                if (unif(engine) * (1.0 + bound) <= w) {
                    out.x[i] = x;
                    out.y[i] = y;
                    trials[i] = n;
                    break;
                }
                if (n >= kMaxTrials) throw std::runtime_error("sarmanov: acceptance rate below 10%");
            }
        }
    });
    double total = 0.0;
    for (auto t : trials) total += static_cast<double>(t);
    out.acceptance_rate = M == 0 ? 1.0 : static_cast<double>(M) / total;
    if (out.acceptance_rate < 0.1) {
        throw std::runtime_error("sarmanov: acceptance rate " + num(out.acceptance_rate) + " below 10%");
    }
    return out;
}

double sarmanov_asymmetry(const SarmanovSpec& spec) {
    const double hh = gaussian_expectation([&](double x) { return spec.h(x) * spec.h(x); });
    const double gg = gaussian_expectation([&](double x) { return spec.g(x) * spec.g(x); });
    const double hg = gaussian_expectation([&](double x) { return spec.h(x) * spec.g(x); });
    return 2.0 * spec.epsilon * (hh * gg - hg * hg);
}

double noise_covariance(const NoiseModel& model, double a, double b, double horizon) {
    if (a < 0.0 || b < 0.0) throw std::invalid_argument("noise_covariance: negative time");
    switch (model.kind) {
        case NoiseKind::bm: return std::min(a, b);
        case NoiseKind::fbm: return fbm_covariance(a, b, model.H);
        case NoiseKind::ou: {
            const double th = model.theta;
            return model.sigma * model.sigma / (2.0 * th) *
                   (std::exp(-th * std::abs(a - b)) - std::exp(-th * (a + b)));
        }
        case NoiseKind::time_changed_bm: {
            auto c = [&](double t) { return horizon * std::pow(t / horizon, model.clock_power); };
            return std::min(c(a), c(b));
        }
        case NoiseKind::tabulated: break;
    }
    throw std::invalid_argument("noise_covariance: tabulated variance carries no covariance");
}

MCEstimate balancing_residual(const BalancingProcess& process, int n, double s, double u, double t,
                              std::size_t M, std::uint64_t seed, std::size_t workers) {
    if (n < 2) throw std::invalid_argument("balancing_residual: n must be at least 2");
    if (!(0.0 <= s && s <= u && u <= t)) throw std::invalid_argument("balancing_residual: need s <= u <= t");
    const double g1 = -0.5 * (u - s);
    const double g2 = -0.5 * (t - u);
    std::vector<double> A(M), B(M);
    if (process.kind == BalancingProcess::Kind::gaussian) {
        const auto& m = process.noise;
        auto C = [&](double a, double b) { return noise_covariance(m, a, b, t); };
        const double va = C(u, u) - 2.0 * C(s, u) + C(s, s);
        const double vb = C(t, t) - 2.0 * C(u, t) + C(u, u);
        const double cab = C(u, t) - C(u, u) - C(s, t) + C(s, u);
        const double l11 = std::sqrt(std::max(va, 0.0));
        const double l21 = l11 > 0.0 ? cab / l11 : 0.0;
        const double l22 = std::sqrt(std::max(vb - l21 * l21, 0.0));
        parallel_blocks(M, 1024, workers, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                auto engine = path_engine(seed, i);
                std::normal_distribution<double> normal;
                const double z1 = normal(engine);
                const double z2 = normal(engine);
                A[i] = l11 * z1;
                B[i] = l21 * z1 + l22 * z2;
            }
        });
    } else {
        const auto pairs = sarmanov_sample(process.sarmanov, M, seed, workers);
        const double sa = std::sqrt(u - s);
        const double sb = std::sqrt(t - u);
        for (std::size_t i = 0; i < M; ++i) {
            A[i] = sa * pairs.x[i];
            B[i] = sb * pairs.y[i];
        }
    }
    std::vector<double> v(M);
    for (std::size_t i = 0; i < M; ++i) {
        double sum = 0.0;
        for (int j = 0; j <= n; ++j) sum += hermite_eval(j, A[i], g1) * hermite_eval(n - j, B[i], g2);
        v[i] = sum;
    }
    return estimate(v);
}

std::vector<MomentRow> moment_bound_check(const NoiseModel& noise, const Grid& grid, int n_max, double C,
                                          std::size_t M, std::uint64_t seed, std::size_t workers) {
    if (n_max < 1 || n_max > 8) throw std::invalid_argument("moment_bound_check: n_max must lie in 1..8");
    if (!(C > 0.0)) throw std::invalid_argument("moment_bound_check: C must be positive");
    std::vector<double> X(M * (grid.N + 1));
    parallel_blocks(M, kFbmBlock, workers, [&](std::size_t begin, std::size_t end) {
        const auto paths = simulate_noise_batch(noise, grid, seed, begin, end - begin);
        for (std::size_t p = begin; p < end; ++p) {
            std::copy(paths[p - begin].values.begin(), paths[p - begin].values.end(),
                      X.begin() + static_cast<std::ptrdiff_t>(p * (grid.N + 1)));
        }
    });
    std::vector<MomentRow> rows;
    std::vector<double> v(M);
    for (int n = 1; n <= n_max; ++n) {
        MomentRow row;
        row.n = n;
        row.moment = -1.0;
        for (std::size_t i = 1; i <= grid.N; ++i) {
            for (std::size_t p = 0; p < M; ++p) v[p] = std::pow(std::abs(X[p * (grid.N + 1) + i]), n);
            const MCEstimate e = estimate(v);
            if (e.mean > row.moment) {
                row.moment = e.mean;
                row.std_error = e.std_error;
                row.time = grid.time(i);
            }
        }
        const double factor = (3.0 + (n % 2 == 1 ? 1.0 : -1.0)) / 2.0;
        row.bound = factor * factorial(n) * std::pow(C, n);
        row.margin = row.bound - row.moment;
        row.holds = row.margin > 0.0;
        rows.push_back(row);
    }
    return rows;
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_normal(std::span<const double> samples, double variance) {
    if (samples.empty()) throw std::invalid_argument("ks_normal: no samples");
    if (!(variance > 0.0)) throw std::invalid_argument("ks_normal: variance must be positive");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    const double sd = std::sqrt(variance);
    double D = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = 0.5 * std::erfc(-x[i] / (sd * std::numbers::sqrt2));
        D = std::max({D, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    KsResult r;
    r.statistic = D;
    const double rn = std::sqrt(n);
    r.p_value = kolmogorov_tail((rn + 0.12 + 0.11 / rn) * D);
    return r;
}

}  // namespace roughlab
