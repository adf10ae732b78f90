#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace roughlab {

struct Grid {
    double T = 1.0;
    std::size_t N = 1;

    Grid() = default;
    Grid(double horizon, std::size_t steps);

    double dt() const { return T / static_cast<double>(N); }
    double time(std::size_t i) const {
        return T * static_cast<double>(i) / static_cast<double>(N);
    }
    // Index of grid point t; throws if t is not within 1e-9 * dt of one.
    std::size_t index_of(double t) const;
    std::size_t nearest_index(double t) const;
    bool operator==(const Grid& other) const = default;
};

// Row-major (N+1) x dim samples.
struct SampledPath {
    Grid grid;
    std::size_t dim = 1;
    std::vector<double> values;
    bool centred = true;

    SampledPath() = default;
    SampledPath(const Grid& g, std::size_t d);

    std::size_t size() const { return grid.N + 1; }
    double operator()(std::size_t i, std::size_t c = 0) const { return values[i * dim + c]; }
    double& at(std::size_t i, std::size_t c = 0) { return values[i * dim + c]; }
    std::vector<double> column(std::size_t c) const;
    SampledPath subsample(std::size_t stride) const;
};

enum class NoiseKind { bm, fbm, ou, time_changed_bm, tabulated };

struct NoiseModel {
    NoiseKind kind = NoiseKind::bm;
    double H = 0.5;            // fbm
    double theta = 1.0;        // ou mean reversion
    double sigma = 1.0;        // ou volatility
    double clock_power = 2.0;  // time_changed_bm: clock c(t) = T (t/T)^p
    std::vector<double> table; // tabulated variance samples

    static NoiseModel bm() { return {}; }
    static NoiseModel fbm(double hurst);
    static NoiseModel ou(double theta, double sigma);
    static NoiseModel time_changed_bm(double power);
    std::string name() const;
};

struct VarianceFunction {
    NoiseKind kind = NoiseKind::bm;
    Grid grid;
    std::vector<double> samples;
    bool monotone = true;
};

VarianceFunction variance_fn(const NoiseModel& model, const Grid& grid);

enum class FbmMethod { automatic, cholesky, circulant };

// Largest grid size for which automatic selection uses the Cholesky factor.
inline constexpr std::size_t kCholeskyAutoLimit = 4096;
// Paths per dense block product; fixed so results do not depend on batching.
inline constexpr std::size_t kFbmBlock = 32;

// Independent stream for (seed, stream index).
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t stream);
void fill_normals(std::mt19937_64& engine, std::span<double> out);

double fbm_covariance(double s, double t, double H);

SampledPath simulate_bm(const Grid& grid, std::uint64_t seed, std::uint64_t path_index = 0,
                        std::size_t dim = 1);
SampledPath simulate_fbm(const Grid& grid, double H, std::uint64_t seed,
                         std::uint64_t path_index = 0, std::size_t dim = 1,
                         FbmMethod method = FbmMethod::automatic);
std::vector<SampledPath> simulate_fbm_batch(const Grid& grid, double H, std::uint64_t seed,
                                            std::uint64_t first_path, std::size_t count,
                                            std::size_t dim = 1,
                                            FbmMethod method = FbmMethod::automatic);
SampledPath simulate_ou(const Grid& grid, double theta, double sigma, std::uint64_t seed,
                        std::uint64_t path_index = 0);
SampledPath simulate_time_changed_bm(const Grid& grid, double power, std::uint64_t seed,
                                     std::uint64_t path_index = 0);

SampledPath simulate_noise(const NoiseModel& model, const Grid& grid, std::uint64_t seed,
                           std::uint64_t path_index = 0);
std::vector<SampledPath> simulate_noise_batch(const NoiseModel& model, const Grid& grid,
                                              std::uint64_t seed, std::uint64_t first_path,
                                              std::size_t count);

void clear_fbm_cache();

struct TimeChange {
    SampledPath path;
    std::vector<std::size_t> source_index;
    double max_rounding = 0.0;
};

// X~_t = X_{clock(t)} on new_grid, clock values rounded to the nearest source point.
TimeChange deterministic_time_change(const SampledPath& path,
                                     const std::function<double(double)>& clock,
                                     const Grid& new_grid);

void write_path_csv(std::ostream& os, const SampledPath& path);
SampledPath read_path_csv(std::istream& is);

}  // namespace roughlab
