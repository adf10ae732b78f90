#include "roughlab/gauss.hpp"

#include "roughlab/csv.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace roughlab {

Grid::Grid(double horizon, std::size_t steps) : T(horizon), N(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("Grid: horizon must be positive and finite");
    }
    if (steps == 0) throw std::invalid_argument("Grid: need at least one step");
}

std::size_t Grid::nearest_index(double t) const {
    double x = t / dt();
    if (x <= 0.0) return 0;
    auto i = static_cast<std::size_t>(std::llround(x));
    return std::min(i, N);
}

std::size_t Grid::index_of(double t) const {
    std::size_t i = nearest_index(t);
    if (std::abs(time(i) - t) > 1e-9 * dt() || t < -1e-9 * dt() || t > T + 1e-9 * dt()) {
        std::ostringstream msg;
        msg << "time " << t << " is not a grid point (dt=" << dt() << ")";
        throw std::invalid_argument(msg.str());
    }
    return i;
}

SampledPath::SampledPath(const Grid& g, std::size_t d)
    : grid(g), dim(d), values((g.N + 1) * d, 0.0) {
    if (d == 0) throw std::invalid_argument("SampledPath: dimension must be positive");
}

std::vector<double> SampledPath::column(std::size_t c) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)(i, c);
    return out;
}

SampledPath SampledPath::subsample(std::size_t stride) const {
    if (stride == 0 || grid.N % stride != 0) {
        throw std::invalid_argument("subsample: stride must divide N");
    }
    SampledPath out(Grid(grid.T, grid.N / stride), dim);
    out.centred = centred;
    for (std::size_t i = 0; i <= out.grid.N; ++i) {
        for (std::size_t c = 0; c < dim; ++c) out.at(i, c) = (*this)(i * stride, c);
    }
    return out;
}

NoiseModel NoiseModel::fbm(double hurst) {
    NoiseModel m;
    m.kind = NoiseKind::fbm;
    m.H = hurst;
    return m;
}

NoiseModel NoiseModel::ou(double th, double sg) {
    NoiseModel m;
    m.kind = NoiseKind::ou;
    m.theta = th;
    m.sigma = sg;
    return m;
}

NoiseModel NoiseModel::time_changed_bm(double power) {
    NoiseModel m;
    m.kind = NoiseKind::time_changed_bm;
    m.clock_power = power;
    return m;
}

std::string NoiseModel::name() const {
    std::ostringstream os;
    switch (kind) {
        case NoiseKind::bm: os << "bm"; break;
        case NoiseKind::fbm: os << "fbm(" << H << ")"; break;
        case NoiseKind::ou: os << "ou(" << theta << ";" << sigma << ")"; break;
        case NoiseKind::time_changed_bm: os << "time_changed_bm(" << clock_power << ")"; break;
        case NoiseKind::tabulated: os << "tabulated"; break;
    }
    return os.str();
}

VarianceFunction variance_fn(const NoiseModel& model, const Grid& grid) {
    VarianceFunction v;
    v.kind = model.kind;
    v.grid = grid;
    v.samples.resize(grid.N + 1);
    for (std::size_t i = 0; i <= grid.N; ++i) {
        const double t = grid.time(i);
        switch (model.kind) {
            case NoiseKind::bm: v.samples[i] = t; break;
            case NoiseKind::fbm: v.samples[i] = std::pow(t, 2.0 * model.H); break;
            case NoiseKind::ou:
                v.samples[i] = model.sigma * model.sigma *
                               (-std::expm1(-2.0 * model.theta * t)) / (2.0 * model.theta);
                break;
            case NoiseKind::time_changed_bm:
                v.samples[i] = grid.T * std::pow(t / grid.T, model.clock_power);
                break;
            case NoiseKind::tabulated: break;
        }
    }
    if (model.kind == NoiseKind::tabulated) {
        if (model.table.size() != grid.N + 1) {
            throw std::invalid_argument("variance_fn: tabulated variance has " +
                                        std::to_string(model.table.size()) +
                                        " samples, grid needs " + std::to_string(grid.N + 1));
        }
        if (model.table[0] != 0.0) throw std::invalid_argument("variance_fn: Var(0) must be 0");
        for (double x : model.table) {
            if (!(x >= 0.0) || !std::isfinite(x)) {
                throw std::invalid_argument("variance_fn: negative or non-finite variance");
            }
        }
        v.samples = model.table;
    }
    if (model.kind == NoiseKind::fbm && !(model.H > 0.0 && model.H < 1.0)) {
        throw std::invalid_argument("variance_fn: H must lie in (0,1)");
    }
    v.monotone = std::is_sorted(v.samples.begin(), v.samples.end());
    return v;
}

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x726c6162u};
    return std::mt19937_64(seq);
}

void fill_normals(std::mt19937_64& engine, std::span<double> out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& z : out) z = normal(engine);
}

double fbm_covariance(double s, double t, double H) {
    const double h2 = 2.0 * H;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

SampledPath simulate_bm(const Grid& grid, std::uint64_t seed, std::uint64_t path_index,
                        std::size_t dim) {
    SampledPath path(grid, dim);
    auto engine = path_engine(seed, path_index);
    std::vector<double> z(grid.N);
    const double sd = std::sqrt(grid.dt());
    for (std::size_t c = 0; c < dim; ++c) {
        fill_normals(engine, z);
        double x = 0.0;
        for (std::size_t i = 0; i < grid.N; ++i) {
            x += sd * z[i];
            path.at(i + 1, c) = x;
        }
    }
    return path;
}

namespace {

struct FbmKey {
    double T;
    std::size_t N;
    double H;
    bool operator<(const FbmKey& o) const {
        return std::tie(T, N, H) < std::tie(o.T, o.N, o.H);
    }
};

std::mutex g_fbm_mutex;
std::map<FbmKey, std::shared_ptr<const Eigen::MatrixXd>> g_cholesky;
std::map<FbmKey, std::shared_ptr<const std::vector<double>>> g_circulant;
std::map<std::size_t, fftw_plan> g_plans;

std::shared_ptr<const Eigen::MatrixXd> cholesky_factor(const Grid& grid, double H) {
    std::lock_guard<std::mutex> lock(g_fbm_mutex);
    auto& slot = g_cholesky[{grid.T, grid.N, H}];
    if (slot) return slot;

    const auto n = static_cast<Eigen::Index>(grid.N);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = fbm_covariance(grid.time(i + 1), grid.time(j + 1), H);
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    double jitter = 0.0;
    if (llt.info() != Eigen::Success) {
        jitter = 1e-12;
        cov.diagonal().array() += jitter;
        llt.compute(cov);
    }
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "simulate_fbm: covariance not positive definite after jitter " << jitter
            << " (H=" << H << ", N=" << grid.N << ", T=" << grid.T
            << ", min diagonal=" << cov.diagonal().minCoeff() << ")";
        throw std::runtime_error(msg.str());
    }
    slot = std::make_shared<const Eigen::MatrixXd>(llt.matrixL());
    return slot;
}

fftw_plan forward_plan(std::size_t m) {
    // Caller holds g_fbm_mutex.
    auto& plan = g_plans[m];
    if (!plan) {
        auto* buf = fftw_alloc_complex(m);
        plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_free(buf);
    }
    return plan;
}

std::shared_ptr<const std::vector<double>> circulant_eigenvalues(std::size_t N, double H) {
    std::lock_guard<std::mutex> lock(g_fbm_mutex);
    auto& slot = g_circulant[{1.0, N, H}];
    if (slot) return slot;
    const std::size_t m = 2 * N;
    const double h2 = 2.0 * H;
    auto gamma = [h2](double k) {
        return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) +
                      std::pow(std::abs(k - 1.0), h2));
    };
    auto* buf = fftw_alloc_complex(m);
    for (std::size_t j = 0; j < m; ++j) {
        double lag = j <= N ? static_cast<double>(j) : static_cast<double>(m - j);
        buf[j][0] = gamma(lag);
        buf[j][1] = 0.0;
    }
    fftw_execute_dft(forward_plan(m), buf, buf);
    auto eig = std::make_shared<std::vector<double>>(m);
    for (std::size_t j = 0; j < m; ++j) {
        double lam = buf[j][0];
        if (lam < -1e-9) {
            fftw_free(buf);
            throw std::runtime_error("simulate_fbm: circulant embedding has negative eigenvalue " +
                                     std::to_string(lam));
        }
        (*eig)[j] = std::max(lam, 0.0);
    }
    fftw_free(buf);
    slot = eig;
    return slot;
}

// Unit-step fractional Gaussian noise by circulant embedding.
void circulant_fgn(std::size_t N, double H, std::mt19937_64& engine, std::span<double> out) {
    auto eig = circulant_eigenvalues(N, H);
    const std::size_t m = 2 * N;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fbm_mutex);
        plan = forward_plan(m);
    }
    std::vector<double> z(2 * m);
    fill_normals(engine, z);
    auto* buf = fftw_alloc_complex(m);
    for (std::size_t j = 0; j < m; ++j) {
        double s = std::sqrt((*eig)[j] / static_cast<double>(m));
        buf[j][0] = s * z[2 * j];
        buf[j][1] = s * z[2 * j + 1];
    }
    fftw_execute_dft(plan, buf, buf);
    for (std::size_t j = 0; j < N; ++j) out[j] = buf[j][0];
    fftw_free(buf);
}

bool use_cholesky(const Grid& grid, FbmMethod method) {
    if (method == FbmMethod::cholesky) return true;
    if (method == FbmMethod::circulant) return false;
    return grid.N <= kCholeskyAutoLimit;
}

void check_hurst(double H) {
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("simulate_fbm: H must lie in (0,1)");
}

}  // namespace

void clear_fbm_cache() {
    std::lock_guard<std::mutex> lock(g_fbm_mutex);
    g_cholesky.clear();
    g_circulant.clear();
}

std::vector<SampledPath> simulate_fbm_batch(const Grid& grid, double H, std::uint64_t seed,
                                            std::uint64_t first_path, std::size_t count,
                                            std::size_t dim, FbmMethod method) {
    check_hurst(H);
    std::vector<SampledPath> out;
    out.reserve(count);
    for (std::size_t p = 0; p < count; ++p) out.emplace_back(grid, dim);
    if (count == 0) return out;
    const std::size_t N = grid.N;

    if (!use_cholesky(grid, method)) {
        const double scale = std::pow(grid.dt(), H);
        std::vector<double> inc(N);
        for (std::size_t p = 0; p < count; ++p) {
            auto engine = path_engine(seed, first_path + p);
            for (std::size_t c = 0; c < dim; ++c) {
                circulant_fgn(N, H, engine, inc);
                double x = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    x += scale * inc[i];
                    out[p].at(i + 1, c) = x;
                }
            }
        }
        return out;
    }

    auto L = cholesky_factor(grid, H);
    const auto n = static_cast<Eigen::Index>(N);
    const std::uint64_t block_begin = first_path / kFbmBlock * kFbmBlock;
    const std::uint64_t end = first_path + count;
    std::vector<double> z(N * dim);
    for (std::uint64_t b = block_begin; b < end; b += kFbmBlock) {
        std::vector<Eigen::MatrixXd> Z(dim, Eigen::MatrixXd::Zero(n, kFbmBlock));
        for (std::size_t j = 0; j < kFbmBlock; ++j) {
            const std::uint64_t idx = b + j;
            if (idx < first_path || idx >= end) continue;
            auto engine = path_engine(seed, idx);
            fill_normals(engine, z);
            for (std::size_t c = 0; c < dim; ++c) {
                for (Eigen::Index i = 0; i < n; ++i) Z[c](i, j) = z[c * N + i];
            }
        }
        for (std::size_t c = 0; c < dim; ++c) {
            Eigen::MatrixXd X = L->triangularView<Eigen::Lower>() * Z[c];
            for (std::size_t j = 0; j < kFbmBlock; ++j) {
                const std::uint64_t idx = b + j;
                if (idx < first_path || idx >= end) continue;
                auto& path = out[idx - first_path];
                for (Eigen::Index i = 0; i < n; ++i) path.at(i + 1, c) = X(i, j);
            }
        }
    }
    return out;
}

SampledPath simulate_fbm(const Grid& grid, double H, std::uint64_t seed, std::uint64_t path_index,
                         std::size_t dim, FbmMethod method) {
    return std::move(simulate_fbm_batch(grid, H, seed, path_index, 1, dim, method).front());
}

SampledPath simulate_ou(const Grid& grid, double theta, double sigma, std::uint64_t seed,
                        std::uint64_t path_index) {
    if (!(theta > 0.0)) throw std::invalid_argument("simulate_ou: theta must be positive");
    SampledPath path(grid, 1);
    auto engine = path_engine(seed, path_index);
    std::vector<double> z(grid.N);
    fill_normals(engine, z);
    const double decay = std::exp(-theta * grid.dt());
    const double sd = sigma * std::sqrt(-std::expm1(-2.0 * theta * grid.dt()) / (2.0 * theta));
    double x = 0.0;
    for (std::size_t i = 0; i < grid.N; ++i) {
        x = decay * x + sd * z[i];
        path.at(i + 1) = x;
    }
    return path;
}

SampledPath simulate_time_changed_bm(const Grid& grid, double power, std::uint64_t seed,
                                     std::uint64_t path_index) {
    if (!(power > 0.0)) throw std::invalid_argument("simulate_time_changed_bm: power must be positive");
    SampledPath path(grid, 1);
    auto engine = path_engine(seed, path_index);
    std::vector<double> z(grid.N);
    fill_normals(engine, z);
    auto clock = [&](std::size_t i) { return grid.T * std::pow(grid.time(i) / grid.T, power); };
    double x = 0.0;
    for (std::size_t i = 0; i < grid.N; ++i) {
        x += std::sqrt(clock(i + 1) - clock(i)) * z[i];
        path.at(i + 1) = x;
    }
    return path;
}

SampledPath simulate_noise(const NoiseModel& model, const Grid& grid, std::uint64_t seed,
                           std::uint64_t path_index) {
    switch (model.kind) {
        case NoiseKind::bm: return simulate_bm(grid, seed, path_index);
        case NoiseKind::fbm: return simulate_fbm(grid, model.H, seed, path_index);
        case NoiseKind::ou: return simulate_ou(grid, model.theta, model.sigma, seed, path_index);
        case NoiseKind::time_changed_bm:
            return simulate_time_changed_bm(grid, model.clock_power, seed, path_index);
        case NoiseKind::tabulated: break;
    }
    throw std::invalid_argument("simulate_noise: tabulated variance has no simulator");
}

std::vector<SampledPath> simulate_noise_batch(const NoiseModel& model, const Grid& grid,
                                              std::uint64_t seed, std::uint64_t first_path,
                                              std::size_t count) {
    if (model.kind == NoiseKind::fbm) {
        return simulate_fbm_batch(grid, model.H, seed, first_path, count);
    }
    std::vector<SampledPath> out;
    out.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
        out.push_back(simulate_noise(model, grid, seed, first_path + p));
    }
    return out;
}

TimeChange deterministic_time_change(const SampledPath& path,
                                     const std::function<double(double)>& clock,
                                     const Grid& new_grid) {
    const double tol = 1e-12 * std::max(1.0, path.grid.T);
    if (std::abs(clock(0.0)) > tol) throw std::invalid_argument("time change: clock(0) must be 0");
    TimeChange out;
    out.path = SampledPath(new_grid, path.dim);
    out.path.centred = path.centred;
    out.source_index.resize(new_grid.N + 1);
    double prev = 0.0;
    for (std::size_t j = 0; j <= new_grid.N; ++j) {
        const double c = clock(new_grid.time(j));
        if (!std::isfinite(c) || c < prev - tol) {
            throw std::invalid_argument("time change: clock must be finite and non-decreasing");
        }
        if (c > path.grid.T + tol) {
            throw std::invalid_argument("time change: clock exceeds the source horizon " +
                                        std::to_string(path.grid.T));
        }
        prev = c;
        const std::size_t i = path.grid.nearest_index(c);
        out.source_index[j] = i;
        out.max_rounding = std::max(out.max_rounding, std::abs(path.grid.time(i) - c));
        for (std::size_t d = 0; d < path.dim; ++d) out.path.at(j, d) = path(i, d);
    }
    return out;
}

void write_path_csv(std::ostream& os, const SampledPath& path) {
    std::vector<std::string> header{"t"};
    for (std::size_t c = 0; c < path.dim; ++c) header.push_back("x" + std::to_string(c + 1));
    write_csv_header(os, header);
    std::vector<double> row(path.dim + 1);
    for (std::size_t i = 0; i < path.size(); ++i) {
        row[0] = path.grid.time(i);
        for (std::size_t c = 0; c < path.dim; ++c) row[c + 1] = path(i, c);
        write_csv_row(os, row);
    }
}

SampledPath read_path_csv(std::istream& is) {
    CsvTable table = read_csv(is);
    if (table.header.size() < 2 || table.header[0] != "t") {
        throw std::runtime_error("path csv: header must be t,x1..xd");
    }
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        if (table.header[c] != "x" + std::to_string(c)) {
            throw std::runtime_error("path csv: unexpected column '" + table.header[c] + "'");
        }
    }
    if (table.rows.size() < 2) throw std::runtime_error("path csv: need at least two rows");
    const std::size_t N = table.rows.size() - 1;
    const double T = table.rows.back()[0];
    Grid grid(T, N);
    for (std::size_t i = 0; i <= N; ++i) {
        if (std::abs(table.rows[i][0] - grid.time(i)) > 1e-9 * grid.dt()) {
            throw std::runtime_error("path csv: times are not a uniform grid starting at 0");
        }
    }
    SampledPath path(grid, table.header.size() - 1);
    for (std::size_t i = 0; i <= N; ++i) {
        for (std::size_t c = 0; c < path.dim; ++c) path.at(i, c) = table.rows[i][c + 1];
    }
    path.centred = true;
    for (std::size_t c = 0; c < path.dim; ++c) path.centred = path.centred && path(0, c) == 0.0;
    return path;
}

}  // namespace roughlab
