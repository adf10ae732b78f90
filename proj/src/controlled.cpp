#include "roughlab/controlled.hpp"

#include "roughlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace roughlab {

ControlledPath make_controlled(const RoughPath1D& rp, std::size_t components) {
    ControlledPath cp;
    cp.grid = rp.grid();
    cp.k = rp.k();
    cp.Y.assign(components, std::vector<double>(rp.grid().N + 1, 0.0));
    cp.regular = rp.renorm().deterministic;
    return cp;
}

ControlledPath operator+(const ControlledPath& a, const ControlledPath& b) {
    if (!(a.grid == b.grid) || a.k != b.k) {
        throw std::invalid_argument("controlled paths over different rough paths");
    }
    ControlledPath out = a.components() >= b.components() ? a : b;
    const ControlledPath& other = a.components() >= b.components() ? b : a;
    for (std::size_t i = 0; i < other.components(); ++i) {
        for (std::size_t t = 0; t < out.Y[i].size(); ++t) out.Y[i][t] += other.Y[i][t];
    }
    out.regular = a.regular && b.regular;
    return out;
}

ControlledPath operator*(double c, const ControlledPath& a) {
    ControlledPath out = a;
    for (auto& y : out.Y) {
        for (double& v : y) v *= c;
    }
    return out;
}

PiecewiseControlledPath::PiecewiseControlledPath(std::vector<std::size_t> bps,
                                                 std::vector<ControlledPath> segs)
    : breakpoints(std::move(bps)), segments(std::move(segs)) {
    if (segments.empty() || breakpoints.size() != segments.size() + 1) {
        throw std::invalid_argument("piecewise path: need one more breakpoint than segments");
    }
    const Grid& grid = segments.front().grid;
    if (breakpoints.front() != 0 || breakpoints.back() != grid.N) {
        throw std::invalid_argument("piecewise path: breakpoints must start at 0 and end at N");
    }
    for (std::size_t j = 0; j < segments.size(); ++j) {
        if (!(segments[j].grid == grid)) throw std::invalid_argument("piecewise path: grid mismatch");
        if (breakpoints[j + 1] <= breakpoints[j]) {
            throw std::invalid_argument("piecewise path: breakpoints must increase");
        }
    }
    for (std::size_t j = 1; j < segments.size(); ++j) {
        const std::size_t b = breakpoints[j];
        const double left = segments[j - 1].Y[0][b];
        const double right = segments[j].Y[0][b];
        if (std::abs(left - right) > 1e-12 * std::max(1.0, std::abs(left))) {
            continuous = false;
            throw std::invalid_argument("piecewise path: Y^(1) jumps at breakpoint " +
                                        std::to_string(b) + "; use SimpleIntegrand for jumps");
        }
    }
}

double polynomial_value(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

std::vector<double> polynomial_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<double>(i) * c[i]);
    return d;
}

DerivativeTable polynomial_function(std::vector<double> coefficients) {
    std::vector<std::vector<double>> derivs{std::move(coefficients)};
    for (int j = 0; j < 24; ++j) derivs.push_back(polynomial_derivative(derivs.back()));
    DerivativeTable F;
    F.max_order = 24;
    F.dx = [derivs](double, double x, int order) {
        return polynomial_value(derivs.at(static_cast<std::size_t>(order)), x);
    };
    return F;
}

DerivativeTable sine_function() {
    DerivativeTable F;
    F.max_order = 64;
    F.dx = [](double, double x, int order) {
        switch (order % 4) {
            case 0: return std::sin(x);
            case 1: return std::cos(x);
            case 2: return -std::sin(x);
            default: return -std::cos(x);
        }
    };
    return F;
}

DerivativeTable exponential_function() {
    DerivativeTable F;
    F.max_order = 64;
    F.dx = [](double, double x, int) { return std::exp(x); };
    return F;
}

ControlledPath polynomial_controlled(const std::vector<double>& coefficients, const RoughPath1D& rp) {
    ControlledPath cp = make_controlled(rp, static_cast<std::size_t>(rp.k()));
    std::vector<double> p = coefficients;
    for (int i = 1; i <= rp.k(); ++i) {
        for (std::size_t t = 0; t <= rp.grid().N; ++t) cp.Y[i - 1][t] = polynomial_value(p, rp.x(t));
        p = polynomial_derivative(p);
    }
    return cp;
}

ControlledPath markovian_controlled(const DerivativeTable& F, const RoughPath1D& rp) {
    if (!F.dx || F.max_order < rp.k()) {
        throw std::invalid_argument("markovian_controlled: derivative table needs space derivatives up to order " +
                                    std::to_string(rp.k()));
    }
    ControlledPath cp = make_controlled(rp, static_cast<std::size_t>(rp.k()));
    for (int i = 1; i <= rp.k(); ++i) {
        for (std::size_t t = 0; t <= rp.grid().N; ++t) {
            cp.Y[i - 1][t] = F.dx(rp.grid().time(t), rp.x(t), i);
        }
    }
    return cp;
}

PiecewiseControlledPath signature_integrand_at(const RoughPath1D& rp, int n, std::size_t s) {
    if (n < 0) throw std::invalid_argument("signature_integrand: negative level");
    if (s > rp.grid().N) throw std::invalid_argument("signature_integrand: start beyond horizon");
    if (n == 0 && s > 0) {
        throw std::invalid_argument("signature_integrand: level 0 started after 0 jumps; use SimpleIntegrand");
    }
    const std::size_t N = rp.grid().N;
    const auto m = static_cast<std::size_t>(std::max(rp.k(), n + 1));
    ControlledPath after = make_controlled(rp, m);
    std::vector<double> lv(static_cast<std::size_t>(n) + 1);
    for (std::size_t t = s; t <= N; ++t) {
        rp.levels(s, t, lv);
        for (std::size_t i = 1; i <= m; ++i) {
            const int level = n + 1 - static_cast<int>(i);
            after.Y[i - 1][t] = level >= 0 ? lv[static_cast<std::size_t>(level)] : 0.0;
        }
    }
    if (s == 0) return PiecewiseControlledPath({0, N}, {after});
    if (s == N) return PiecewiseControlledPath({0, N}, {make_controlled(rp, m)});
    return PiecewiseControlledPath({0, s, N}, {make_controlled(rp, m), std::move(after)});
}

PiecewiseControlledPath signature_integrand(const RoughPath1D& rp, int n, double s) {
    return signature_integrand_at(rp, n, rp.grid().index_of(s));
}

std::vector<double> remainder_profile(const ControlledPath& cp, const RoughPath1D& rp) {
    if (!(cp.grid == rp.grid())) throw std::invalid_argument("remainder_profile: grid mismatch");
    const int k = rp.k();
    const std::size_t N = rp.grid().N;
    auto comp = [&](int i, std::size_t t) {
        return static_cast<std::size_t>(i) <= cp.components() ? cp.Y[i - 1][t] : 0.0;
    };
    std::vector<std::vector<double>> inv(static_cast<std::size_t>(k) + 1, std::vector<double>(N + 1, 0.0));
    for (int i = 1; i <= k; ++i) {
        const double expo = (k + 1 - i) * rp.alpha();
        for (std::size_t lag = 1; lag <= N; ++lag) {
            inv[i][lag] = std::pow(static_cast<double>(lag) * rp.grid().dt(), -expo);
        }
    }
    std::vector<double> best(static_cast<std::size_t>(k), 0.0);
    std::vector<double> lv(static_cast<std::size_t>(k));
    std::vector<double> ys(static_cast<std::size_t>(k) + 1);
    for (std::size_t s = 0; s < N; ++s) {
        for (int j = 1; j <= k; ++j) ys[j] = comp(j, s);
        for (std::size_t t = s + 1; t <= N; ++t) {
            rp.levels(s, t, lv);
            for (int i = 1; i <= k; ++i) {
                double r = comp(i, t) - ys[i];
                for (int j = i + 1; j <= k; ++j) r -= ys[j] * lv[j - i];
                best[i - 1] = std::max(best[i - 1], std::abs(r) * inv[i][t - s]);
            }
        }
    }
    return best;
}

void write_controlled_csv(std::ostream& os, const ControlledPath& cp) {
    std::vector<std::string> header{"t"};
    for (std::size_t i = 1; i <= cp.components(); ++i) header.push_back("Y" + std::to_string(i));
    write_csv_header(os, header);
    std::vector<double> row(header.size());
    for (std::size_t t = 0; t <= cp.grid.N; ++t) {
        row[0] = cp.grid.time(t);
        for (std::size_t i = 0; i < cp.components(); ++i) row[i + 1] = cp.Y[i][t];
        write_csv_row(os, row);
    }
}

}  // namespace roughlab
