#pragma once

#include "roughlab/integrate.hpp"
#include "roughlab/rde.hpp"
#include "roughlab/roughpath.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roughlab {

inline constexpr double kSelfFinancingTolerance = 1e-4;

// Prices (S^0 = 1, S^1..S^d) and their level-2 lift; coordinate 0 is the riskless asset.
struct RoughMarket {
    SampledPath S;
    RoughPathL2 lift;

    std::size_t assets() const { return S.dim; }  // d + 1
};

// Prepends the riskless coordinate to a lift of the risky prices.
RoughMarket make_market(const RoughPathL2& risky);

// S^e_t = exp(sigma * B^e_t), B^1..B^d independent fBm sampled on a grid R times finer than
// the coarse grid; the lift is built from the fine path with the given scheme.
RoughMarket exponential_fbm_market(const Grid& coarse, std::size_t refinement, std::size_t d, double H,
                                   double sigma, Scheme scheme, std::uint64_t seed, std::uint64_t path_index);

struct Strategy {
    ControlledPathL2 portfolio;        // holdings per asset and their derivative in the prices
    std::size_t exit_index = SIZE_MAX; // liquidation time; SIZE_MAX means hold to the horizon
    std::string warning;
};

// Hold `units` of asset e until exit.
Strategy buy_and_hold(const RoughMarket& market, std::size_t asset, double units = 1.0,
                      std::size_t exit_index = SIZE_MAX);

struct GainResult {
    std::vector<double> gain;  // frozen after exit
    IntegralResult terminal;   // refinement of the gain at the exit time
    std::size_t exit_index = 0;
};

GainResult gain_process(const Strategy& strategy, const RoughMarket& market,
                        std::vector<std::size_t> mesh_levels = {1});

// V_t = sum_e Y^e_t S^e_t up to exit, constant afterwards.
std::vector<double> value_process(const Strategy& strategy, const RoughMarket& market);

// sup_t |V_t - V_0 - G_t|; value defaults to value_process.
double self_financing_residual(const Strategy& strategy, const RoughMarket& market,
                               const std::vector<double>* value = nullptr);

double power_mean(double p, std::span<const double> prices);

// Holdings grad M^p(S) with derivative the Hessian of M^p.
Strategy p_portfolio(double p, const RoughMarket& market);

struct ArbitrageReport {
    double p = 1.0;
    double q = 2.0;
    std::vector<double> spread;   // M^q_t - M^p_t
    std::vector<double> gain;     // rough integral of the long-short holdings
    double min_spread = 0.0;
    double terminal_gain = 0.0;
    double residual_p = 0.0;
    double residual_q = 0.0;
    double geometric_residual = 0.0;
    bool degenerate = false;
    bool claim_valid = false;
    std::string diagnostic;
};

ArbitrageReport arbitrage_demo(double p, double q, const RoughMarket& market);

void write_market_csv(std::ostream& os, const RoughMarket& market, const std::vector<double>& value,
                      const std::vector<double>& gain);

struct ClockTime {
    std::size_t first_above = 0;  // first grid index with G2 > level; a stopping time
    std::size_t index = 0;        // nearest grid point to the crossing
    double time = 0.0;      // grid time of index
    double crossing = 0.0;  // interpolated crossing time
    double rounding = 0.0;  // |time - crossing|
};

// First crossing of `level` by a non-decreasing G2, rounded to the nearest grid point.
ClockTime renorm_clock(std::span<const double> G2, const Grid& grid, double level);

struct ClockChange {
    RoughPath1D path;                   // time-changed rough path on the clock grid
    std::vector<std::size_t> source;    // source grid index per clock grid point
    double max_rounding = 0.0;
};

// X~_t = X_{tau_t}, G~^m_t = G^m_{tau_t} with tau the clock of G^2.
ClockChange clock_time_change(const RoughPath1D& rp, const Grid& clock_grid);

struct ArbitrageBatchSpec {
    std::size_t paths = 1000;
    std::size_t N = 2048;
    std::size_t refinement = 64;
    std::size_t d = 2;
    double H = 0.7;
    double sigma = 1.0;
    double T = 1.0;
    double p = 1.0;
    double q = 2.0;
    Scheme scheme = Scheme::young;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
};

struct ArbitrageBatch {
    std::vector<ArbitrageReport> reports;  // spread and gain paths dropped except for path 0
    std::size_t claims = 0;
    std::size_t negative_spread = 0;
    std::size_t nonpositive_terminal = 0;
    std::size_t degenerate = 0;
    double max_residual = 0.0;
    double min_residual = 0.0;
};

ArbitrageBatch arbitrage_batch(const ArbitrageBatchSpec& spec);
void write_arbitrage_summary_csv(std::ostream& os, const ArbitrageBatch& batch);

}  // namespace roughlab
