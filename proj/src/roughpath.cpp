#include "roughlab/roughpath.hpp"

#include "roughlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace roughlab {

RenormTerms::RenormTerms(int level, const Grid& g, bool is_deterministic)
    : k(level), grid(g), deterministic(is_deterministic) {
    if (level < 1) throw std::invalid_argument("RenormTerms: level must be positive");
    G.assign(static_cast<std::size_t>(level - 1), std::vector<double>(g.N + 1, 0.0));
}

std::vector<double> RenormTerms::total_variation() const {
    std::vector<double> tv;
    for (const auto& g : G) {
        double v = 0.0;
        for (std::size_t i = 1; i < g.size(); ++i) v += std::abs(g[i] - g[i - 1]);
        tv.push_back(v);
    }
    return tv;
}

int level_from_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1]");
    }
    return static_cast<int>(std::floor(1.0 / alpha + 1e-12));
}

RoughPath1D::RoughPath1D(SampledPath X, RenormTerms G, double alpha)
    : X_(std::move(X)), G_(std::move(G)), alpha_(alpha), k_(level_from_alpha(alpha)) {
    if (X_.dim != 1) throw std::invalid_argument("RoughPath1D: path must be one-dimensional");
    if (G_.G.size() != static_cast<std::size_t>(k_ - 1)) {
        throw std::invalid_argument("RoughPath1D: expected " + std::to_string(k_ - 1) +
                                    " renormalisation levels for alpha=" + std::to_string(alpha) +
                                    ", got " + std::to_string(G_.G.size()));
    }
    if (!(G_.grid == X_.grid)) throw std::invalid_argument("RoughPath1D: renormalisation grid mismatch");
    for (const auto& g : G_.G) {
        if (g.size() != X_.size()) throw std::invalid_argument("RoughPath1D: renormalisation length mismatch");
        for (double v : g) {
            if (!std::isfinite(v)) throw std::invalid_argument("RoughPath1D: non-finite renormalisation");
        }
    }
    G_.k = k_;
    polys_.reserve(kMaxBellIndex + 1);
    for (int n = 0; n <= kMaxBellIndex; ++n) polys_.push_back(&bell_terms(k_, n));
}

void RoughPath1D::arguments(std::size_t s, std::size_t t, std::span<double> a) const {
    a[0] = increment(s, t);
    for (int m = 2; m <= k_; ++m) a[m - 1] = G_.increment(m, s, t);
}

double RoughPath1D::level(int i, std::size_t s, std::size_t t) const {
    if (i < 0 || i > kMaxBellIndex) throw std::out_of_range("RoughPath1D::level: index out of range");
    if (s == t) return i == 0 ? 1.0 : 0.0;
    double buf[kMaxBellIndex + 1];
    std::span<double> a(buf, static_cast<std::size_t>(k_));
    arguments(s, t, a);
    return bell_eval(*polys_[i], a);
}

void RoughPath1D::levels(std::size_t s, std::size_t t, std::span<double> out) const {
    if (out.size() > static_cast<std::size_t>(kMaxBellIndex + 1)) {
        throw std::out_of_range("RoughPath1D::levels: too many levels requested");
    }
    if (s == t) {
        std::fill(out.begin(), out.end(), 0.0);
        if (!out.empty()) out[0] = 1.0;
        return;
    }
    double buf[kMaxBellIndex + 1];
    std::span<double> a(buf, static_cast<std::size_t>(k_));
    arguments(s, t, a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = bell_eval(*polys_[i], a);
}

RoughPath1D lift_from_renorm(const SampledPath& X, const RenormTerms& G, double alpha) {
    return RoughPath1D(X, G, alpha);
}

RoughPath1D hermite_lift(const SampledPath& X, const VarianceFunction& V, double alpha) {
    if (!(V.grid == X.grid) || V.samples.size() != X.size()) {
        throw std::invalid_argument("hermite_lift: variance function is sampled on a different grid");
    }
    const int k = level_from_alpha(alpha);
    RenormTerms G(k, X.grid, true);
    if (k >= 2) {
        for (std::size_t i = 0; i < X.size(); ++i) G.G[0][i] = -0.5 * V.samples[i];
    }
    return RoughPath1D(X, std::move(G), alpha);
}

RoughPath1D geometric_lift(const SampledPath& X, double alpha) {
    return RoughPath1D(X, RenormTerms(level_from_alpha(alpha), X.grid, true), alpha);
}

RoughPath1D ito_lift(const SampledPath& X, double alpha) {
    const int k = level_from_alpha(alpha);
    RenormTerms G(k, X.grid, false);
    if (k >= 2) {
        double qv = 0.0;
        for (std::size_t i = 1; i < X.size(); ++i) {
            const double dx = X.values[i] - X.values[i - 1];
            qv += dx * dx;
            G.G[0][i] = -0.5 * qv;
        }
    }
    return RoughPath1D(X, std::move(G), alpha);
}

LevelAccessor accessor(const RoughPath1D& rp) {
    return {rp.k(), rp.grid(),
            [&rp](int i, std::size_t s, std::size_t t) { return rp.level(i, s, t); }};
}

ChenReport chen_residual(const LevelAccessor& acc, std::size_t sample_triples, std::uint64_t seed) {
    ChenReport report;
    std::mt19937_64 engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, acc.grid.N);
    const auto k = static_cast<std::size_t>(acc.k);
    std::vector<double> su(k + 1), ut(k + 1), st(k + 1);
    for (std::size_t n = 0; n < sample_triples; ++n) {
        std::array<std::size_t, 3> tr{pick(engine), pick(engine), pick(engine)};
        std::sort(tr.begin(), tr.end());
        for (std::size_t i = 0; i <= k; ++i) {
            su[i] = acc.level(static_cast<int>(i), tr[0], tr[1]);
            ut[i] = acc.level(static_cast<int>(i), tr[1], tr[2]);
            st[i] = acc.level(static_cast<int>(i), tr[0], tr[2]);
            report.scale = std::max({report.scale, std::abs(su[i]), std::abs(ut[i]), std::abs(st[i])});
        }
        for (std::size_t i = 1; i <= k; ++i) {
            double chen = 0.0;
            for (std::size_t j = 0; j <= i; ++j) chen += su[j] * ut[i - j];
            const double r = std::abs(st[i] - chen);
            if (!(r <= report.max_abs)) {
                report.max_abs = r;
                report.worst = tr;
                report.worst_level = static_cast<int>(i);
            }
        }
    }
    return report;
}

ChenReport chen_residual(const RoughPath1D& rp, std::size_t sample_triples, std::uint64_t seed) {
    return chen_residual(accessor(rp), sample_triples, seed);
}

RenormTerms extract_renorm(const LevelAccessor& acc, double alpha, std::size_t check_triples) {
    const int k = level_from_alpha(alpha);
    if (k != acc.k) {
        throw std::invalid_argument("extract_renorm: accessor has " + std::to_string(acc.k) +
                                    " levels but alpha implies " + std::to_string(k));
    }
    ChenReport chen = chen_residual(acc, check_triples, 7);
    if (!(chen.relative() <= kChenTolerance)) {
        std::ostringstream msg;
        msg << "extract_renorm: Chen relation violated (residual " << chen.max_abs << " at level "
            << chen.worst_level << ", triple " << chen.worst[0] << "," << chen.worst[1] << ","
            << chen.worst[2] << ")";
        throw ChenViolation(chen, msg.str());
    }
    RenormTerms F(k, acc.grid, false);
    const auto& grid = acc.grid;
    std::vector<double> a(static_cast<std::size_t>(k));
    for (std::size_t t = 0; t <= grid.N; ++t) {
        std::fill(a.begin(), a.end(), 0.0);
        a[0] = acc.level(1, 0, t);
        for (int j = 2; j <= k; ++j) {
            // a_j is still zero here, so this is P_j without its a_j term.
            const double f = acc.level(j, 0, t) - bell_eval(k, j, a);
            F.G[j - 2][t] = f;
            a[j - 1] = f;
        }
    }
    return F;
}

double holder_constant(const Grid& grid,
                       const std::function<double(std::size_t, std::size_t)>& values, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("holder_constant: gamma must be positive");
    std::vector<double> inv(grid.N + 1, 0.0);
    for (std::size_t lag = 1; lag <= grid.N; ++lag) {
        inv[lag] = std::pow(static_cast<double>(lag) * grid.dt(), -gamma);
    }
    double best = 0.0;
    for (std::size_t s = 0; s < grid.N; ++s) {
        for (std::size_t t = s + 1; t <= grid.N; ++t) {
            best = std::max(best, std::abs(values(s, t)) * inv[t - s]);
        }
    }
    return best;
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ito: return "ito";
        case Scheme::stratonovich: return "stratonovich";
        case Scheme::young: return "young";
        case Scheme::hermite: return "hermite";
    }
    return "unknown";
}

RoughPathL2::RoughPathL2(SampledPath X, std::vector<double> increments, Scheme scheme)
    : X_(std::move(X)), A_(std::move(increments)), scheme_(scheme) {
    if (A_.size() != X_.grid.N * X_.dim * X_.dim) {
        throw std::invalid_argument("RoughPathL2: increment array has wrong size");
    }
}

void RoughPathL2::level2(std::size_t s, std::size_t t, std::span<double> out) const {
    const std::size_t d = dim();
    if (out.size() != d * d) throw std::invalid_argument("RoughPathL2::level2: output must be d x d");
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> acc(d, 0.0);
    for (std::size_t j = s; j < t; ++j) {
        const double* a = interval(j);
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < d; ++q) {
                out[p * d + q] += a[p * d + q] + acc[p] * (X_(j + 1, q) - X_(j, q));
            }
        }
        for (std::size_t p = 0; p < d; ++p) acc[p] += X_(j + 1, p) - X_(j, p);
    }
}

RoughPathL2 level2_from_fine(const SampledPath& fine, const Grid& coarse, Scheme scheme) {
    if (scheme == Scheme::hermite) {
        throw std::invalid_argument("level2_from_fine: scheme must be ito, stratonovich or young");
    }
    if (std::abs(fine.grid.T - coarse.T) > 1e-12 * coarse.T) {
        throw std::invalid_argument("level2_from_fine: horizons differ");
    }
    if (fine.grid.N % coarse.N != 0) {
        throw std::invalid_argument("level2_from_fine: fine grid does not refine the coarse grid by an integer factor");
    }
    const std::size_t R = fine.grid.N / coarse.N;
    if (R < 16) throw std::invalid_argument("level2_from_fine: refinement factor must be at least 16");
    const std::size_t d = fine.dim;
    SampledPath X = fine.subsample(R);
    std::vector<double> A(coarse.N * d * d, 0.0);
    std::vector<double> a(d), dx(d);
    for (std::size_t j = 0; j < coarse.N; ++j) {
        double* blk = A.data() + j * d * d;
        std::fill(a.begin(), a.end(), 0.0);
        for (std::size_t r = 0; r < R; ++r) {
            const std::size_t i = j * R + r;
            for (std::size_t p = 0; p < d; ++p) dx[p] = fine(i + 1, p) - fine(i, p);
            for (std::size_t p = 0; p < d; ++p) {
                const double left = scheme == Scheme::ito ? a[p] : a[p] + 0.5 * dx[p];
                for (std::size_t q = 0; q < d; ++q) blk[p * d + q] += left * dx[q];
            }
            for (std::size_t p = 0; p < d; ++p) a[p] += dx[p];
        }
    }
    return RoughPathL2(std::move(X), std::move(A), scheme);
}

RoughPathL2 to_level2(const RoughPath1D& rp) {
    const std::size_t N = rp.grid().N;
    std::vector<double> A(N);
    for (std::size_t j = 0; j < N; ++j) A[j] = rp.level(2, j, j + 1);
    bool geometric = true;
    for (const auto& g : rp.renorm().G) {
        for (double v : g) geometric = geometric && v == 0.0;
    }
    return RoughPathL2(rp.path(), std::move(A), geometric ? Scheme::young : Scheme::hermite);
}

RoughPathL2 zero_extend(const RoughPathL2& rp, std::size_t leading_constant, double constant_value) {
    const std::size_t d = rp.dim();
    const std::size_t e = d + leading_constant;
    SampledPath X(rp.grid(), e);
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t c = 0; c < leading_constant; ++c) X.at(i, c) = constant_value;
        for (std::size_t c = 0; c < d; ++c) X.at(i, leading_constant + c) = rp.path()(i, c);
    }
    X.centred = false;
    std::vector<double> A(rp.grid().N * e * e, 0.0);
    for (std::size_t j = 0; j < rp.grid().N; ++j) {
        const double* src = rp.interval(j);
        double* dst = A.data() + j * e * e;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < d; ++q) {
                dst[(leading_constant + p) * e + leading_constant + q] = src[p * d + q];
            }
        }
    }
    return RoughPathL2(std::move(X), std::move(A), rp.scheme());
}

double geometric_check_l2(const RoughPathL2& rp) {
    const std::size_t d = rp.dim();
    double worst = 0.0;
    auto check = [&](const double* blk, std::size_t s, std::size_t t) {
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < d; ++q) {
                const double r = blk[p * d + q] + blk[q * d + p] -
                                 rp.increment(s, t, p) * rp.increment(s, t, q);
                worst = std::max(worst, std::abs(r));
            }
        }
    };
    for (std::size_t j = 0; j < rp.grid().N; ++j) check(rp.interval(j), j, j + 1);
    std::vector<double> full(d * d);
    rp.level2(0, rp.grid().N, full);
    check(full.data(), 0, rp.grid().N);
    return worst;
}

ChenReport chen_residual(const RoughPathL2& rp, std::size_t sample_triples, std::uint64_t seed) {
    ChenReport report;
    std::mt19937_64 engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, rp.grid().N);
    const std::size_t d = rp.dim();
    std::vector<double> su(d * d), ut(d * d), st(d * d);
    for (std::size_t n = 0; n < sample_triples; ++n) {
        std::array<std::size_t, 3> tr{pick(engine), pick(engine), pick(engine)};
        std::sort(tr.begin(), tr.end());
        rp.level2(tr[0], tr[1], su);
        rp.level2(tr[1], tr[2], ut);
        rp.level2(tr[0], tr[2], st);
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < d; ++q) {
                const std::size_t pq = p * d + q;
                const double chen = su[pq] + ut[pq] + rp.increment(tr[0], tr[1], p) * rp.increment(tr[1], tr[2], q);
                report.scale = std::max({report.scale, std::abs(st[pq]), std::abs(su[pq]), std::abs(ut[pq])});
                const double r = std::abs(st[pq] - chen);
                if (!(r <= report.max_abs)) {
                    report.max_abs = r;
                    report.worst = tr;
                    report.worst_level = 2;
                }
            }
        }
    }
    return report;
}

LevelAccessor accessor(const RoughPathL2& rp) {
    if (rp.dim() != 1) throw std::invalid_argument("accessor: level accessor needs a one-dimensional lift");
    return {2, rp.grid(), [&rp](int i, std::size_t s, std::size_t t) -> double {
                if (i == 0) return 1.0;
                if (i == 1) return rp.increment(s, t, 0);
                if (i == 2) {
                    double v = 0.0;
                    rp.level2(s, t, std::span<double>(&v, 1));
                    return v;
                }
                return 0.0;
            }};
}

void write_levels_csv(std::ostream& os, const RoughPath1D& rp,
                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    write_csv_header(os, {"i", "s", "t", "value"});
    std::vector<double> lv(static_cast<std::size_t>(rp.k()) + 1);
    for (const auto& [s, t] : pairs) {
        rp.levels(s, t, lv);
        for (std::size_t i = 0; i < lv.size(); ++i) {
            write_csv_row(os, {static_cast<double>(i), rp.grid().time(s), rp.grid().time(t), lv[i]});
        }
    }
}

void write_renorm_csv(std::ostream& os, const RenormTerms& G) {
    std::vector<std::string> header{"t"};
    for (int m = 2; m <= G.k; ++m) header.push_back("G" + std::to_string(m));
    write_csv_header(os, header);
    std::vector<double> row(header.size());
    for (std::size_t i = 0; i <= G.grid.N; ++i) {
        row[0] = G.grid.time(i);
        for (int m = 2; m <= G.k; ++m) row[m - 1] = G.at(m, i);
        write_csv_row(os, row);
    }
}

}  // namespace roughlab
