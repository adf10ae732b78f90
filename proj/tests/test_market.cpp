#include <catch2/catch_amalgamated.hpp>

#include "roughlab/market.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

using namespace roughlab;

namespace {

// Two smooth risky assets lifted from a 16x finer grid.
RoughMarket smooth_market(std::size_t N = 256) {
    const Grid fine(1.0, 16 * N);
    SampledPath S(fine, 2);
    for (std::size_t i = 0; i <= fine.N; ++i) {
        const double t = fine.time(i);
        S.at(i, 0) = std::exp(std::sin(4.0 * t));
        S.at(i, 1) = 1.0 + t * t - 0.5 * t;
    }
    S.centred = false;
    return make_market(level2_from_fine(S, Grid(1.0, N), Scheme::young));
}

}  // namespace

TEST_CASE("power means", "[market]") {
    const std::vector<double> s{1.0, 2.0, 4.0};
    CHECK(power_mean(1.0, s) == Catch::Approx(7.0 / 3.0));
    CHECK(power_mean(2.0, s) == Catch::Approx(std::sqrt(21.0 / 3.0)));
    CHECK(power_mean(-1.0, s) == Catch::Approx(3.0 / (1.0 + 0.5 + 0.25)));
    CHECK(power_mean(3.5, std::vector<double>{2.0, 2.0}) == Catch::Approx(2.0));
    CHECK_THROWS(power_mean(0.0, s));
    CHECK_THROWS(power_mean(1.0, std::vector<double>{1.0, -1.0}));
    CHECK_THROWS(power_mean(1.0, std::vector<double>{}));
}

TEST_CASE("power means increase with the order", "[market]") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<double> s(1 + trial % 5);
        for (auto& v : s) v = u(rng);
        const double p = u(rng) - 5.0;
        const double q = p + u(rng);
        if (p == 0.0 || q == 0.0) continue;
        CHECK(power_mean(p, s) <= power_mean(q, s) * (1.0 + 1e-12));
    }
}

TEST_CASE("riskless coordinate", "[market]") {
    const RoughMarket m = smooth_market(32);
    REQUIRE(m.assets() == 3);
    for (std::size_t t = 0; t <= 32; ++t) CHECK(m.S(t, 0) == 1.0);
    std::vector<double> blk(9);
    m.lift.level2(0, 32, blk);
    for (int i = 0; i < 3; ++i) {
        CHECK(blk[i] == 0.0);
        CHECK(blk[3 * i] == 0.0);
    }
}

TEST_CASE("buy and hold", "[market]") {
    const RoughMarket m = smooth_market(128);
    const Strategy hold = buy_and_hold(m, 1, 2.0);
    const GainResult g = gain_process(hold, m, {1, 2, 4});
    for (std::size_t t = 0; t <= 128; ++t) CHECK(g.gain[t] == Catch::Approx(2.0 * (m.S(t, 1) - m.S(0, 1))).margin(1e-12));
    CHECK(g.terminal.value == Catch::Approx(g.gain.back()).margin(1e-12));
    CHECK(self_financing_residual(hold, m) <= 1e-12);

    const Strategy early = buy_and_hold(m, 2, 1.0, 40);
    const GainResult e = gain_process(early, m);
    CHECK(e.exit_index == 40);
    for (std::size_t t = 40; t <= 128; ++t) CHECK(e.gain[t] == e.gain[40]);
    const auto V = value_process(early, m);
    CHECK(V[128] == V[40]);
    CHECK(self_financing_residual(early, m) <= 1e-12);
    CHECK_THROWS(buy_and_hold(m, 3));
}

TEST_CASE("cash holdings do not change the gain", "[market]") {
    const RoughMarket m = smooth_market(64);
    Strategy s = p_portfolio(2.0, m);
    const auto before = gain_process(s, m).gain;
    CHECK(gain_process(buy_and_hold(m, 0, 5.0), m).gain.back() == 0.0);
    for (std::size_t t = 0; t <= 64; ++t) s.portfolio.y(t, 0) += 3.0 + 0.1 * static_cast<double>(t);
    const auto after = gain_process(s, m).gain;
    for (std::size_t t = 0; t <= 64; ++t) CHECK(after[t] == Catch::Approx(before[t]).margin(1e-13));
}

TEST_CASE("power-mean portfolios", "[market]") {
    const RoughMarket m = smooth_market(512);
    for (double p : {-1.0, 0.5, 1.0, 2.0, 3.0}) {
        const Strategy s = p_portfolio(p, m);
        CHECK(s.warning.empty());
        const auto V = value_process(s, m);
        std::vector<double> S(3);
        for (std::size_t t = 0; t <= 512; t += 64) {
            for (int e = 0; e < 3; ++e) S[e] = m.S(t, e);
            // homogeneity: sum_e S^e dM/dS^e = M
            CHECK(V[t] == Catch::Approx(power_mean(p, S)).epsilon(1e-12));
            for (int e = 0; e < 3; ++e) {
                for (int f = 0; f < 3; ++f) CHECK(s.portfolio.yp(t, e, f) == Catch::Approx(s.portfolio.yp(t, f, e)).margin(1e-14));
            }
        }
        // second order in the mesh
        const RoughMarket coarse = smooth_market(128);
        const double r_fine = self_financing_residual(s, m);
        CHECK(r_fine <= kSelfFinancingTolerance);
        // constant holdings for p = 1 make the residual vanish at every mesh
        if (p != 1.0) CHECK(self_financing_residual(p_portfolio(p, coarse), coarse) > 8.0 * r_fine);
    }
    const Strategy flat = p_portfolio(1.0, m);
    CHECK(flat.portfolio.y(100, 2) == Catch::Approx(1.0 / 3.0));
    CHECK(flat.portfolio.yp(100, 1, 2) == 0.0);
    CHECK_THROWS(p_portfolio(0.0, m));
}

TEST_CASE("hessian of the power mean by finite differences", "[market]") {
    const RoughMarket m = smooth_market(16);
    const Strategy s = p_portfolio(2.5, m);
    const std::size_t t = 9;
    std::vector<double> S{m.S(t, 0), m.S(t, 1), m.S(t, 2)};
    for (int e = 0; e < 3; ++e) {
        for (int f = 0; f < 3; ++f) {
            const double h = 1e-5;
            auto grad_e = [&](double shift) {
                std::vector<double> a = S, b = S;
                a[f] += shift;
                b[f] += shift;
                a[e] += h;
                b[e] -= h;
                return (power_mean(2.5, a) - power_mean(2.5, b)) / (2 * h);
            };
            const double fd = (grad_e(h) - grad_e(-h)) / (2 * h);
            CHECK(s.portfolio.yp(t, e, f) == Catch::Approx(fd).margin(1e-4));
        }
    }
}

TEST_CASE("arbitrage on a smooth geometric market", "[market]") {
    const RoughMarket m = smooth_market(512);
    const ArbitrageReport r = arbitrage_demo(1.0, 2.0, m);
    CHECK(r.claim_valid);
    CHECK(r.min_spread >= 0.0);
    CHECK(r.terminal_gain > 0.0);
    CHECK(r.terminal_gain == Catch::Approx(r.spread.back() - r.spread.front()).epsilon(1e-5));
    CHECK(r.geometric_residual <= 1e-12);
    CHECK_THROWS(arbitrage_demo(2.0, 1.0, m));
}

TEST_CASE("identical assets are degenerate", "[market]") {
    const Grid fine(1.0, 16 * 32);
    SampledPath S(fine, 2);
    for (auto& v : S.values) v = 1.0;
    const RoughMarket m = make_market(level2_from_fine(S, Grid(1.0, 32), Scheme::young));
    const ArbitrageReport r = arbitrage_demo(1.0, 2.0, m);
    CHECK(r.degenerate);
    CHECK_FALSE(r.claim_valid);
    CHECK(r.terminal_gain == 0.0);
}

TEST_CASE("exponential fbm markets", "[market]") {
    const Grid coarse(1.0, 64);
    const RoughMarket m = exponential_fbm_market(Grid(1.0, 512), 16, 2, 0.7, 1.0, Scheme::young, 3, 0);
    CHECK(m.assets() == 3);
    CHECK(m.S(0, 1) == 1.0);
    CHECK(geometric_check_l2(m.lift) <= 1e-12);
    const ArbitrageReport r = arbitrage_demo(1.0, 2.0, m);
    CHECK(r.min_spread >= 0.0);
    CHECK(std::max(r.residual_p, r.residual_q) <= kSelfFinancingTolerance);
    CHECK(r.claim_valid);
    CHECK_THROWS(exponential_fbm_market(coarse, 16, 0, 0.7, 1.0, Scheme::young, 3, 0));
    CHECK_THROWS(make_market(level2_from_fine(
        [] {
            SampledPath S(Grid(1.0, 16), 1);
            S.values[16] = std::nan("");
            return S;
        }(),
        Grid(1.0, 1), Scheme::young)));
}

TEST_CASE("ito markets refuse the claim", "[market]") {
    const RoughMarket m = exponential_fbm_market(Grid(1.0, 128), 64, 2, 0.5, 1.0, Scheme::ito, 5, 0);
    const ArbitrageReport r = arbitrage_demo(1.0, 2.0, m);
    CHECK(r.geometric_residual > 1e-3);
    CHECK(std::max(r.residual_p, r.residual_q) > kSelfFinancingTolerance);
    CHECK_FALSE(r.claim_valid);
    CHECK_FALSE(r.diagnostic.empty());
    CHECK_FALSE(p_portfolio(2.0, m).warning.empty());
}

TEST_CASE("arbitrage batches", "[market]") {
    ArbitrageBatchSpec spec;
    spec.paths = 6;
    spec.N = 64;
    spec.refinement = 16;
    spec.workers = 1;
    const ArbitrageBatch a = arbitrage_batch(spec);
    spec.workers = 3;
    const ArbitrageBatch b = arbitrage_batch(spec);
    std::stringstream sa, sb;
    write_arbitrage_summary_csv(sa, a);
    write_arbitrage_summary_csv(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(a.reports.size() == 6);
    CHECK_FALSE(a.reports[0].spread.empty());
    CHECK(a.reports[1].spread.empty());
    CHECK(a.claims + a.degenerate <= 6);
    CHECK(a.max_residual >= a.min_residual);
    std::string line;
    std::getline(sa, line);
    CHECK(line == "path,min_gain,terminal_gain,residual_p,residual_q,geometric_residual,degenerate,claim_valid");
}

TEST_CASE("market csv", "[market]") {
    const RoughMarket m = smooth_market(8);
    const Strategy s = p_portfolio(2.0, m);
    std::stringstream ss;
    write_market_csv(ss, m, value_process(s, m), gain_process(s, m).gain);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "t,S0,S1,S2,V,G");
    CHECK_THROWS(write_market_csv(ss, m, {1.0}, {1.0}));
}

TEST_CASE("renormalisation clock", "[market]") {
    const Grid g(1.0, 100);
    std::vector<double> lin(101), flat(101);
    for (std::size_t i = 0; i <= 100; ++i) {
        lin[i] = 2.0 * g.time(i);
        flat[i] = std::max(0.0, g.time(i) - 0.5);
    }
    const ClockTime c = renorm_clock(lin, g, 1.0);
    CHECK(c.time == Catch::Approx(0.5));
    CHECK(c.crossing == Catch::Approx(0.5));
    CHECK(c.first_above == 51);
    // flat stretch is skipped
    const ClockTime f = renorm_clock(flat, g, 0.0);
    CHECK(f.time == Catch::Approx(0.5));
    CHECK(f.first_above == 51);
    const ClockTime h = renorm_clock(lin, g, 0.333);
    CHECK(h.crossing == Catch::Approx(0.1665));
    CHECK(h.index == 17);
    CHECK(h.rounding == Catch::Approx(0.0035));
    CHECK_THROWS_AS(renorm_clock(lin, g, 2.5), std::domain_error);
    std::vector<double> down = lin;
    down[40] = 0.0;
    CHECK_THROWS_AS(renorm_clock(down, g, 1.0), std::invalid_argument);
}

TEST_CASE("clock time change straightens the renormalisation", "[market]") {
    const Grid g(1.0, 2000);
    RenormTerms G(2, g);
    for (std::size_t i = 0; i <= g.N; ++i) G.G[0][i] = g.time(i) * g.time(i);
    const RoughPath1D rp = lift_from_renorm(simulate_bm(g, 2, 0), G, 0.45);
    const ClockChange cc = clock_time_change(rp, Grid(0.9, 90));
    const RenormTerms F = extract_renorm(accessor(cc.path), 0.45);
    const double step = 1.0 - std::pow(1999.0 / 2000.0, 2);
    for (std::size_t j = 0; j <= 90; ++j) CHECK(std::abs(F.at(2, j) - cc.path.grid().time(j)) <= step);
    CHECK(cc.max_rounding <= 0.5 * g.dt() + 1e-12);
    CHECK_THROWS(clock_time_change(geometric_lift(simulate_bm(g, 1, 0), 0.9), Grid(0.5, 10)));
}
