#include "roughlab/market.hpp"

#include "roughlab/csv.hpp"
#include "roughlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace roughlab {

RoughMarket make_market(const RoughPathL2& risky) {
    RoughPathL2 lift = zero_extend(risky, 1, 1.0);
    SampledPath S = lift.path();
    for (double v : S.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("make_market: non-finite price");
    }
    return RoughMarket{std::move(S), std::move(lift)};
}

RoughMarket exponential_fbm_market(const Grid& coarse, std::size_t refinement, std::size_t d, double H,
                                   double sigma, Scheme scheme, std::uint64_t seed, std::uint64_t path_index) {
    if (d == 0) throw std::invalid_argument("exponential_fbm_market: need at least one risky asset");
    const Grid fine(coarse.T, coarse.N * refinement);
    SampledPath B = simulate_fbm(fine, H, seed, path_index, d);
    for (double& v : B.values) v = std::exp(sigma * v);
    B.centred = false;
    return make_market(level2_from_fine(B, coarse, scheme));
}

Strategy buy_and_hold(const RoughMarket& market, std::size_t asset, double units, std::size_t exit_index) {
    const std::size_t m = market.assets();
    if (asset >= m) throw std::out_of_range("buy_and_hold: no such asset");
    Strategy s;
    s.portfolio = ControlledPathL2(market.S.grid, m, m);
    for (std::size_t t = 0; t <= market.S.grid.N; ++t) s.portfolio.y(t, asset) = units;
    s.exit_index = exit_index;
    return s;
}

namespace {

std::size_t exit_of(const Strategy& s, const RoughMarket& market) {
    return std::min(s.exit_index, market.S.grid.N);
}

void check_strategy(const Strategy& s, const RoughMarket& market) {
    const std::size_t m = market.assets();
    if (s.portfolio.m != m || s.portfolio.d != m || !(s.portfolio.grid == market.S.grid)) {
        throw std::invalid_argument("strategy holdings do not match the market");
    }
}

}  // namespace

GainResult gain_process(const Strategy& strategy, const RoughMarket& market,
                        std::vector<std::size_t> mesh_levels) {
    check_strategy(strategy, market);
    GainResult r;
    r.exit_index = exit_of(strategy, market);
    r.gain = rough_integral_path_l2(strategy.portfolio, market.lift);
    for (std::size_t t = r.exit_index + 1; t < r.gain.size(); ++t) r.gain[t] = r.gain[r.exit_index];
    if (r.exit_index == 0) {
        r.terminal.converged = true;
        return r;
    }
    const auto meshes = sorted_meshes(std::move(mesh_levels), r.exit_index);
    std::vector<double> values;
    for (std::size_t m : meshes) values.push_back(rough_integral_l2(strategy.portfolio, market.lift, 0, r.exit_index, m));
    r.terminal = summarize(meshes, values, market.S.grid.dt());
    return r;
}

std::vector<double> value_process(const Strategy& strategy, const RoughMarket& market) {
    check_strategy(strategy, market);
    const std::size_t N = market.S.grid.N;
    const std::size_t tau = exit_of(strategy, market);
    std::vector<double> V(N + 1, 0.0);
    for (std::size_t t = 0; t <= N; ++t) {
        if (t > tau) {
            V[t] = V[tau];
            continue;
        }
        double v = 0.0;
        for (std::size_t e = 0; e < market.assets(); ++e) v += strategy.portfolio.y(t, e) * market.S(t, e);
        V[t] = v;
    }
    return V;
}

double self_financing_residual(const Strategy& strategy, const RoughMarket& market,
                               const std::vector<double>* value) {
    const std::vector<double> own = value ? std::vector<double>{} : value_process(strategy, market);
    const std::vector<double>& V = value ? *value : own;
    if (V.size() != market.S.grid.N + 1) throw std::invalid_argument("self_financing_residual: value path length");
    const GainResult g = gain_process(strategy, market);
    double worst = 0.0;
    for (std::size_t t = 0; t < V.size(); ++t) worst = std::max(worst, std::abs(V[t] - V[0] - g.gain[t]));
    return worst;
}

double power_mean(double p, std::span<const double> prices) {
    if (p == 0.0) throw std::invalid_argument("power_mean: p must be non-zero");
    if (prices.empty()) throw std::invalid_argument("power_mean: no prices");
    double sum = 0.0;
    for (double s : prices) {
        if (!(s > 0.0)) throw std::invalid_argument("power_mean: prices must be strictly positive");
        sum += std::pow(s, p);
    }
    return std::pow(sum / static_cast<double>(prices.size()), 1.0 / p);
}

Strategy p_portfolio(double p, const RoughMarket& market) {
    if (p == 0.0) throw std::invalid_argument("p_portfolio: p must be non-zero");
    const std::size_t m = market.assets();
    const std::size_t N = market.S.grid.N;
    Strategy s;
    s.portfolio = ControlledPathL2(market.S.grid, m, m);
    std::vector<double> S(m), a(m);
    for (std::size_t t = 0; t <= N; ++t) {
        for (std::size_t e = 0; e < m; ++e) S[e] = market.S(t, e);
        const double M = power_mean(p, S);
        double sigma = 0.0;
        for (std::size_t e = 0; e < m; ++e) {
            a[e] = std::pow(S[e], p - 1.0);
            sigma += a[e] * S[e];
        }
        for (std::size_t e = 0; e < m; ++e) {
            s.portfolio.y(t, e) = M * a[e] / sigma;
            for (std::size_t f = 0; f < m; ++f) {
                const double diag = e == f ? a[e] / S[e] : 0.0;
                s.portfolio.yp(t, e, f) = (p - 1.0) * M / sigma * (diag - a[e] * a[f] / sigma);
            }
        }
    }
    double scale = 1.0;
    for (double v : market.S.values) scale = std::max(scale, v * v);
    const double geo = geometric_check_l2(market.lift);
    if (geo > 1e-9 * scale) {
        s.warning = "market lift is not geometric (shuffle residual " + format_double(geo) + ")";
    }
    return s;
}

ArbitrageReport arbitrage_demo(double p, double q, const RoughMarket& market) {
    if (!(p < q)) throw std::invalid_argument("arbitrage_demo: need p < q");
    ArbitrageReport r;
    r.p = p;
    r.q = q;
    const Strategy short_leg = p_portfolio(p, market);
    const Strategy long_leg = p_portfolio(q, market);
    const std::size_t N = market.S.grid.N;
    const std::size_t m = market.assets();
    r.spread.resize(N + 1);
    std::vector<double> S(m);
    double spread_scale = 0.0;
    for (std::size_t t = 0; t <= N; ++t) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t e = 0; e < m; ++e) {
            S[e] = market.S(t, e);
            lo = std::min(lo, S[e]);
            hi = std::max(hi, S[e]);
        }
        spread_scale = std::max(spread_scale, (hi - lo) / std::max(1.0, hi));
        r.spread[t] = power_mean(q, S) - power_mean(p, S);
    }
    r.min_spread = *std::min_element(r.spread.begin(), r.spread.end());
    r.degenerate = spread_scale <= 1e-12;

    Strategy combined = long_leg;
    for (std::size_t i = 0; i < combined.portfolio.Y.size(); ++i) combined.portfolio.Y[i] -= short_leg.portfolio.Y[i];
    for (std::size_t i = 0; i < combined.portfolio.Yp.size(); ++i) combined.portfolio.Yp[i] -= short_leg.portfolio.Yp[i];
    r.gain = gain_process(combined, market).gain;
    r.terminal_gain = r.gain.back();
    r.residual_p = self_financing_residual(short_leg, market);
    r.residual_q = self_financing_residual(long_leg, market);
    r.geometric_residual = geometric_check_l2(market.lift);

    if (r.degenerate) {
        r.diagnostic = "identical price paths: no arbitrage to claim";
    } else if (!short_leg.warning.empty()) {
        r.diagnostic = short_leg.warning;
    } else if (std::max(r.residual_p, r.residual_q) > kSelfFinancingTolerance) {
        r.diagnostic = "self-financing residual " + format_double(std::max(r.residual_p, r.residual_q)) +
                       " exceeds " + format_double(kSelfFinancingTolerance);
    } else if (r.min_spread < 0.0) {
        r.diagnostic = "negative spread";
    } else if (!(r.terminal_gain > 0.0)) {
        r.diagnostic = "terminal gain not positive";
    } else {
        r.claim_valid = true;
    }
    return r;
}

void write_market_csv(std::ostream& os, const RoughMarket& market, const std::vector<double>& value,
                      const std::vector<double>& gain) {
    const std::size_t N = market.S.grid.N;
    if (value.size() != N + 1 || gain.size() != N + 1) throw std::invalid_argument("write_market_csv: path length");
    std::vector<std::string> header{"t"};
    for (std::size_t e = 0; e < market.assets(); ++e) header.push_back("S" + std::to_string(e));
    header.push_back("V");
    header.push_back("G");
    write_csv_header(os, header);
    std::vector<double> row;
    for (std::size_t t = 0; t <= N; ++t) {
        row.assign(1, market.S.grid.time(t));
        for (std::size_t e = 0; e < market.assets(); ++e) row.push_back(market.S(t, e));
        row.push_back(value[t]);
        row.push_back(gain[t]);
        write_csv_row(os, row);
    }
}

ClockTime renorm_clock(std::span<const double> G2, const Grid& grid, double level) {
    if (G2.size() != grid.N + 1) throw std::invalid_argument("renorm_clock: G2 has wrong length");
    double scale = 1.0;
    for (double v : G2) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 1; i < G2.size(); ++i) {
        if (G2[i] < G2[i - 1] - 1e-12 * scale) {
            throw std::invalid_argument("renorm_clock: G2 decreases at grid index " + std::to_string(i));
        }
    }
    std::size_t j = 0;
    while (j < G2.size() && !(G2[j] > level)) ++j;
    if (j == G2.size()) {
        throw std::domain_error("renorm_clock: level " + format_double(level) + " is never exceeded (G2(T) = " +
                                format_double(G2.back()) + ")");
    }
    ClockTime c;
    c.first_above = j;
    if (j == 0) {
        c.crossing = 0.0;
    } else {
        const double w = (level - G2[j - 1]) / (G2[j] - G2[j - 1]);
        c.crossing = grid.time(j - 1) + std::clamp(w, 0.0, 1.0) * grid.dt();
    }
    c.index = grid.nearest_index(c.crossing);
    c.time = grid.time(c.index);
    c.rounding = std::abs(c.time - c.crossing);
    return c;
}

ClockChange clock_time_change(const RoughPath1D& rp, const Grid& clock_grid) {
    if (rp.k() < 2) throw std::invalid_argument("clock_time_change: needs a level-2 renormalisation");
    const auto& G = rp.renorm();
    std::vector<std::size_t> source(clock_grid.N + 1);
    double rounding = 0.0;
    for (std::size_t j = 0; j <= clock_grid.N; ++j) {
        const ClockTime c = renorm_clock(G.G[0], rp.grid(), clock_grid.time(j));
        source[j] = c.index;
        rounding = std::max(rounding, c.rounding);
    }
    SampledPath X(clock_grid, 1);
    RenormTerms Gt(rp.k(), clock_grid, G.deterministic);
    for (std::size_t j = 0; j <= clock_grid.N; ++j) {
        X.at(j) = rp.x(source[j]);
        for (std::size_t m = 0; m < Gt.G.size(); ++m) Gt.G[m][j] = G.G[m][source[j]];
    }
    X.centred = rp.path().centred && source[0] == 0;
    return ClockChange{RoughPath1D(std::move(X), std::move(Gt), rp.alpha()), std::move(source), rounding};
}

ArbitrageBatch arbitrage_batch(const ArbitrageBatchSpec& spec) {
    if (spec.paths == 0) throw std::invalid_argument("arbitrage_batch: need at least one path");
    const Grid coarse(spec.T, spec.N);
    ArbitrageBatch batch;
    batch.reports.resize(spec.paths);
    parallel_blocks(spec.paths, 1, spec.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const RoughMarket market =
                exponential_fbm_market(coarse, spec.refinement, spec.d, spec.H, spec.sigma, spec.scheme, spec.seed, i);
            ArbitrageReport r = arbitrage_demo(spec.p, spec.q, market);
            if (i > 0) {
                r.spread.clear();
                r.gain.clear();
            }
            batch.reports[i] = std::move(r);
        }
    });
    batch.min_residual = std::numeric_limits<double>::infinity();
    for (const auto& r : batch.reports) {
        const double res = std::max(r.residual_p, r.residual_q);
        batch.max_residual = std::max(batch.max_residual, res);
        batch.min_residual = std::min(batch.min_residual, res);
        batch.claims += r.claim_valid ? 1 : 0;
        batch.negative_spread += r.min_spread < 0.0 ? 1 : 0;
        batch.nonpositive_terminal += (!r.degenerate && !(r.terminal_gain > 0.0)) ? 1 : 0;
        batch.degenerate += r.degenerate ? 1 : 0;
    }
    return batch;
}

void write_arbitrage_summary_csv(std::ostream& os, const ArbitrageBatch& batch) {
    os << "path,min_gain,terminal_gain,residual_p,residual_q,geometric_residual,degenerate,claim_valid\n";
    for (std::size_t i = 0; i < batch.reports.size(); ++i) {
        const auto& r = batch.reports[i];
        os << i << ',' << format_double(r.min_spread) << ',' << format_double(r.terminal_gain) << ','
           << format_double(r.residual_p) << ',' << format_double(r.residual_q) << ','
           << format_double(r.geometric_residual) << ',' << (r.degenerate ? 1 : 0) << ','
           << (r.claim_valid ? 1 : 0) << '\n';
    }
}

}  // namespace roughlab
