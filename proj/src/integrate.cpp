#include "roughlab/integrate.hpp"

#include "roughlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace roughlab {

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double fit_rate(const std::vector<double>& meshes, const std::vector<double>& diffs) {
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < diffs.size() && j < meshes.size(); ++j) {
        if (diffs[j] > 0.0 && std::isfinite(diffs[j])) {
            xs.push_back(std::log(meshes[j]));
            ys.push_back(std::log(diffs[j]));
        }
    }
    if (xs.size() < 2) return 0.0;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        mx += xs[j];
        my += ys[j];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        sxy += (xs[j] - mx) * (ys[j] - my);
        sxx += (xs[j] - mx) * (xs[j] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

namespace {

void check_base(const Grid& cp_grid, int cp_k, const RoughPath1D& rp) {
    if (!(cp_grid == rp.grid()) || cp_k != rp.k()) {
        throw std::invalid_argument("integrand is not controlled by this rough path (grid or level mismatch)");
    }
}

void check_range(std::size_t s, std::size_t t, std::size_t N) {
    if (s > t || t > N) throw std::invalid_argument("integration range out of order or beyond the grid");
}

double young_step(double f_left, double f_right, double dg, YoungRule rule) {
    switch (rule) {
        case YoungRule::left: return f_left * dg;
        case YoungRule::right: return f_right * dg;
        case YoungRule::trapezoid: return 0.5 * (f_left + f_right) * dg;
    }
    return 0.0;
}

}  // namespace

double compensated_sum(const ControlledPath& cp, const RoughPath1D& rp, std::size_t s, std::size_t t,
                       std::size_t stride) {
    check_base(cp.grid, cp.k, rp);
    check_range(s, t, rp.grid().N);
    if (stride == 0 || (t - s) % stride != 0) {
        throw std::invalid_argument("compensated_sum: stride does not divide the range");
    }
    const std::size_t m = cp.components();
    std::vector<double> lv(m + 1);
    std::vector<double> terms;
    terms.reserve((t - s) / stride);
    for (std::size_t u = s; u < t; u += stride) {
        rp.levels(u, u + stride, lv);
        double xi = 0.0;
        for (std::size_t i = 1; i <= m; ++i) xi += cp.Y[i - 1][u] * lv[i];
        terms.push_back(xi);
    }
    return pairwise_sum(terms);
}

std::vector<std::size_t> sorted_meshes(std::vector<std::size_t> meshes, std::size_t span) {
    if (meshes.empty()) meshes.push_back(1);
    std::sort(meshes.begin(), meshes.end());
    meshes.erase(std::unique(meshes.begin(), meshes.end()), meshes.end());
    for (std::size_t m : meshes) {
        if (m == 0 || span % m != 0) {
            throw std::invalid_argument("mesh stride " + std::to_string(m) +
                                        " does not divide the integration range of " +
                                        std::to_string(span) + " steps");
        }
    }
    return meshes;
}

IntegralResult summarize(const std::vector<std::size_t>& meshes, const std::vector<double>& values,
                         double dt) {
    IntegralResult r;
    r.value = values.front();
    std::vector<double> hs, diffs;
    for (std::size_t j = 0; j < meshes.size(); ++j) {
        r.refinement_levels.emplace_back(meshes[j], values[j]);
        if (j + 1 < meshes.size()) {
            hs.push_back(static_cast<double>(meshes[j]) * dt);
            diffs.push_back(std::abs(values[j] - values[j + 1]));
        }
    }
    r.rate_estimate = fit_rate(hs, diffs);
    r.converged = !diffs.empty() && diffs.front() < kConvergenceTolerance * std::max(1.0, std::abs(r.value));
    return r;
}

StepLevels step_levels(const RoughPath1D& rp, int max_level) {
    if (max_level < 0 || max_level > kMaxBellIndex) throw std::out_of_range("step_levels: level out of range");
    StepLevels L;
    L.width = static_cast<std::size_t>(max_level) + 1;
    const std::size_t N = rp.grid().N;
    L.values.resize(N * L.width);
    for (std::size_t u = 0; u < N; ++u) {
        rp.levels(u, u + 1, std::span<double>(L.values.data() + u * L.width, L.width));
    }
    return L;
}

double compensated_sum(const ControlledPath& cp, const StepLevels& levels, std::size_t s, std::size_t t) {
    const std::size_t m = cp.components();
    if (m >= levels.width) throw std::invalid_argument("compensated_sum: level table too narrow");
    if (s > t || t > cp.grid.N) throw std::invalid_argument("compensated_sum: range out of order or beyond the grid");
    std::vector<double> terms;
    terms.reserve(t - s);
    for (std::size_t u = s; u < t; ++u) {
        const double* lv = levels.at(u);
        double xi = 0.0;
        for (std::size_t i = 1; i <= m; ++i) xi += cp.Y[i - 1][u] * lv[i];
        terms.push_back(xi);
    }
    return pairwise_sum(terms);
}

double compensated_sum(const PiecewiseControlledPath& cp, const StepLevels& levels, std::size_t s,
                       std::size_t t) {
    double total = 0.0;
    for (std::size_t j = 0; j < cp.segments.size(); ++j) {
        const std::size_t lo = std::max(s, cp.breakpoints[j]);
        const std::size_t hi = std::min(t, cp.breakpoints[j + 1]);
        if (lo < hi) total += compensated_sum(cp.segments[j], levels, lo, hi);
    }
    return total;
}

IntegralResult rough_integral(const ControlledPath& cp, const RoughPath1D& rp, std::size_t s,
                              std::size_t t, std::vector<std::size_t> mesh_levels) {
    check_base(cp.grid, cp.k, rp);
    check_range(s, t, rp.grid().N);
    if (s == t) {
        IntegralResult r;
        r.converged = true;
        return r;
    }
    auto meshes = sorted_meshes(std::move(mesh_levels), t - s);
    std::vector<double> values;
    for (std::size_t m : meshes) values.push_back(compensated_sum(cp, rp, s, t, m));
    return summarize(meshes, values, rp.grid().dt());
}

IntegralResult rough_integral(const PiecewiseControlledPath& cp, const RoughPath1D& rp, std::size_t s,
                              std::size_t t, std::vector<std::size_t> mesh_levels) {
    check_range(s, t, rp.grid().N);
    if (s == t) {
        IntegralResult r;
        r.converged = true;
        return r;
    }
    auto meshes = sorted_meshes(std::move(mesh_levels), t - s);
    std::vector<double> values(meshes.size(), 0.0);
    for (std::size_t j = 0; j < cp.segments.size(); ++j) {
        const std::size_t lo = std::max(s, cp.breakpoints[j]);
        const std::size_t hi = std::min(t, cp.breakpoints[j + 1]);
        if (lo >= hi) continue;
        for (std::size_t q = 0; q < meshes.size(); ++q) {
            if ((hi - lo) % meshes[q] != 0) {
                throw std::invalid_argument("mesh stride " + std::to_string(meshes[q]) +
                                            " does not fit the segment [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
            }
            values[q] += compensated_sum(cp.segments[j], rp, lo, hi, meshes[q]);
        }
    }
    return summarize(meshes, values, rp.grid().dt());
}

double simple_integral(const SimpleIntegrand& h, const SampledPath& X, std::size_t s, std::size_t t) {
    if (h.s > h.u) throw std::invalid_argument("simple integrand window out of order");
    if (!std::isfinite(h.xi)) throw std::invalid_argument("simple integrand value must be finite");
    const std::size_t a = std::max(s, h.s);
    const std::size_t b = std::min(t, h.u);
    if (a >= b) return 0.0;
    return h.xi * (X(b) - X(a));
}

std::vector<double> rough_integral_path(const ControlledPath& cp, const RoughPath1D& rp) {
    check_base(cp.grid, cp.k, rp);
    const std::size_t N = rp.grid().N;
    const std::size_t m = cp.components();
    std::vector<double> out(N + 1, 0.0);
    std::vector<double> lv(m + 1);
    double acc = 0.0;
    for (std::size_t u = 0; u < N; ++u) {
        rp.levels(u, u + 1, lv);
        double xi = 0.0;
        for (std::size_t i = 1; i <= m; ++i) xi += cp.Y[i - 1][u] * lv[i];
        acc += xi;
        out[u + 1] = acc;
    }
    return out;
}

double young_integral(std::span<const double> f, std::span<const double> g, YoungRule rule) {
    if (f.size() != g.size() || f.empty()) throw std::invalid_argument("young_integral: length mismatch");
    std::vector<double> terms(f.size() - 1);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) terms[i] = young_step(f[i], f[i + 1], g[i + 1] - g[i], rule);
    return pairwise_sum(terms);
}

std::vector<double> young_integral_path(std::span<const double> f, std::span<const double> g,
                                        YoungRule rule) {
    if (f.size() != g.size() || f.empty()) throw std::invalid_argument("young_integral: length mismatch");
    std::vector<double> out(f.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        acc += young_step(f[i], f[i + 1], g[i + 1] - g[i], rule);
        out[i + 1] = acc;
    }
    return out;
}

IntegralResult young_integral_diagnostic(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size() || f.size() < 2) throw std::invalid_argument("young_integral: length mismatch");
    std::vector<std::size_t> meshes{1};
    std::vector<double> values{young_integral(f, g)};
    const std::size_t n = f.size() - 1;
    if (n % 2 == 0) {
        std::vector<double> f2, g2;
        for (std::size_t i = 0; i <= n; i += 2) {
            f2.push_back(f[i]);
            g2.push_back(g[i]);
        }
        meshes.push_back(2);
        values.push_back(young_integral(f2, g2));
    }
    return summarize(meshes, values, 1.0);
}

std::vector<double> ito_residual(const DerivativeTable& F, const RoughPath1D& rp, YoungRule rule) {
    const int k = rp.k();
    if (!F.dx || F.max_order < k) {
        throw std::invalid_argument("ito_residual: derivative table needs space derivatives up to order " +
                                    std::to_string(k));
    }
    const Grid& grid = rp.grid();
    const std::size_t N = grid.N;
    auto value = [&](int order, std::size_t t) { return F.dx(grid.time(t), rp.x(t), order); };
    std::vector<double> res(N + 1, 0.0);
    std::vector<double> lv(static_cast<std::size_t>(k) + 1);
    std::vector<double> dl(static_cast<std::size_t>(k) + 1), dr(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) dl[i] = value(i, 0);
    const double f0 = dl[0];
    double rough = 0.0, drift = 0.0, correction = 0.0;
    for (std::size_t u = 0; u < N; ++u) {
        for (int i = 0; i <= k; ++i) dr[i] = value(i, u + 1);
        rp.levels(u, u + 1, lv);
        for (int i = 1; i <= k; ++i) rough += dl[i] * lv[i];
        for (int i = 2; i <= k; ++i) correction += young_step(dl[i], dr[i], rp.renorm().increment(i, u, u + 1), rule);
        if (F.dt) {
            drift += young_step(F.dt(grid.time(u), rp.x(u)), F.dt(grid.time(u + 1), rp.x(u + 1)), grid.dt(), rule);
        }
        res[u + 1] = (dr[0] - f0) - (drift + rough - correction);
        std::swap(dl, dr);
    }
    return res;
}

ControlledPath integral_as_controlled(const ControlledPath& cp, const RoughPath1D& rp) {
    check_base(cp.grid, cp.k, rp);
    const std::size_t m = cp.components() > static_cast<std::size_t>(rp.k())
                              ? cp.components() + 1
                              : static_cast<std::size_t>(rp.k());
    ControlledPath out = make_controlled(rp, m);
    out.Y[0] = rough_integral_path(cp, rp);
    for (std::size_t i = 1; i < m && i - 1 < cp.components(); ++i) out.Y[i] = cp.Y[i - 1];
    out.regular = cp.regular;
    return out;
}

ControlledPath integral_as_controlled(const PiecewiseControlledPath& cp, const RoughPath1D& rp,
                                      std::size_t from) {
    const std::size_t N = rp.grid().N;
    if (from > N) throw std::invalid_argument("integral_as_controlled: start beyond horizon");
    std::size_t comps = 0;
    for (const auto& seg : cp.segments) {
        check_base(seg.grid, seg.k, rp);
        comps = std::max(comps, seg.components());
    }
    const std::size_t m = comps > static_cast<std::size_t>(rp.k()) ? comps + 1 : static_cast<std::size_t>(rp.k());
    ControlledPath out = make_controlled(rp, m);
    std::vector<double> lv(comps + 1);
    std::size_t seg = 0;
    double acc = 0.0;
    for (std::size_t t = 0; t <= N; ++t) {
        while (seg + 1 < cp.segments.size() && t >= cp.breakpoints[seg + 1]) ++seg;
        const auto& Y = cp.segments[seg];
        if (t > from) {
            std::size_t useg = 0;
            while (useg + 1 < cp.segments.size() && t - 1 >= cp.breakpoints[useg + 1]) ++useg;
            const auto& Yu = cp.segments[useg];
            rp.levels(t - 1, t, lv);
            for (std::size_t i = 1; i <= Yu.components(); ++i) acc += Yu.Y[i - 1][t - 1] * lv[i];
        }
        out.Y[0][t] = acc;
        for (std::size_t i = 1; i < m && i - 1 < Y.components(); ++i) out.Y[i][t] = Y.Y[i - 1][t];
    }
    return out;
}

void write_refinement_csv(std::ostream& os, const IntegralResult& r, double dt) {
    write_csv_header(os, {"mesh", "value", "diff"});
    for (std::size_t j = 0; j < r.refinement_levels.size(); ++j) {
        const double diff = j == 0 ? 0.0 : std::abs(r.refinement_levels[j].second - r.refinement_levels[j - 1].second);
        write_csv_row(os, {static_cast<double>(r.refinement_levels[j].first) * dt,
                           r.refinement_levels[j].second, diff});
    }
}

}  // namespace roughlab
