#include "roughlab/rde.hpp"

#include "roughlab/csv.hpp"
#include "roughlab/integrate.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace roughlab {

ControlledPathL2::ControlledPathL2(const Grid& g, std::size_t values, std::size_t driver_dim)
    : grid(g), m(values), d(driver_dim), Y((g.N + 1) * values, 0.0),
      Yp((g.N + 1) * values * driver_dim, 0.0) {}

ControlledPathL2 identity_controlled(const RoughPathL2& rp) {
    const std::size_t d = rp.dim();
    ControlledPathL2 cp(rp.grid(), d, d);
    for (std::size_t t = 0; t <= rp.grid().N; ++t) {
        for (std::size_t a = 0; a < d; ++a) {
            cp.y(t, a) = rp.path()(t, a);
            cp.yp(t, a, a) = 1.0;
        }
    }
    return cp;
}

VectorField linear_field(double scale) {
    VectorField v;
    v.m = 1;
    v.d = 1;
    v.f = [scale](std::span<const double> y, std::span<double> out) { out[0] = scale * y[0]; };
    v.df = [scale](std::span<const double>, std::span<double> out) { out[0] = scale; };
    return v;
}

RdeSolution solve_rde_davie(const VectorField& field, const std::vector<double>& y0,
                            const RoughPathL2& driver) {
    const std::size_t m = field.m;
    const std::size_t d = field.d;
    if (d != driver.dim()) throw std::invalid_argument("solve_rde_davie: vector field and driver dimensions differ");
    if (y0.size() != m) throw std::invalid_argument("solve_rde_davie: initial value has wrong dimension");
    if (!field.f || !field.df) throw std::invalid_argument("solve_rde_davie: vector field needs f and Df");
    const std::size_t N = driver.grid().N;
    RdeSolution sol;
    sol.path = ControlledPathL2(driver.grid(), m, d);
    sol.driver_scheme = driver.scheme();
    std::vector<double> y = y0, next(m), F(m * d), DF(m * m * d), x(d);
    for (std::size_t t = 0;; ++t) {
        for (std::size_t a = 0; a < m; ++a) sol.path.y(t, a) = y[a];
        field.f(y, F);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < d; ++b) sol.path.yp(t, a, b) = F[a * d + b];
        }
        sol.valid_until = t;
        if (t == N) break;
        field.df(y, DF);
        const double* A = driver.interval(t);
        for (std::size_t c = 0; c < d; ++c) x[c] = driver.increment(t, t + 1, c);
        bool finite = true;
        for (std::size_t i = 0; i < m; ++i) {
            double v = y[i];
            for (std::size_t c = 0; c < d; ++c) v += F[i * d + c] * x[c];
            for (std::size_t b = 0; b < d; ++b) {
                for (std::size_t c = 0; c < d; ++c) {
                    double coef = 0.0;
                    for (std::size_t j = 0; j < m; ++j) coef += DF[(i * m + j) * d + c] * F[j * d + b];
                    v += coef * A[b * d + c];
                }
            }
            next[i] = v;
            finite = finite && std::isfinite(v);
        }
        if (!finite) {
            sol.truncated = true;
            sol.diagnostic = "non-finite state after step " + std::to_string(t) + " at time " +
                             std::to_string(driver.grid().time(t + 1));
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t r = t + 1; r <= N; ++r) {
                for (std::size_t a = 0; a < m; ++a) {
                    sol.path.y(r, a) = nan;
                    for (std::size_t b = 0; b < d; ++b) sol.path.yp(r, a, b) = nan;
                }
            }
            break;
        }
        y = next;
    }
    return sol;
}

namespace {

void check_stride(std::size_t s, std::size_t t, std::size_t stride, std::size_t N) {
    if (s > t || t > N) throw std::invalid_argument("integration range out of order or beyond the grid");
    if (stride == 0 || (t - s) % stride != 0) throw std::invalid_argument("stride does not divide the range");
}

}  // namespace

double rough_integral_l2(const ControlledPathL2& A, const RoughPathL2& rp, std::size_t s, std::size_t t,
                         std::size_t stride) {
    const std::size_t d = rp.dim();
    if (A.m != d || A.d != d || !(A.grid == rp.grid())) {
        throw std::invalid_argument("rough_integral_l2: integrand does not match the rough path");
    }
    check_stride(s, t, stride, rp.grid().N);
    std::vector<double> X2(d * d), terms;
    for (std::size_t u = s; u < t; u += stride) {
        const std::size_t v = u + stride;
        if (stride == 1) {
            std::copy(rp.interval(u), rp.interval(u) + d * d, X2.begin());
        } else {
            rp.level2(u, v, X2);
        }
        double xi = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            xi += A.y(u, a) * rp.increment(u, v, a);
            for (std::size_t b = 0; b < d; ++b) xi += A.yp(u, a, b) * X2[b * d + a];
        }
        terms.push_back(xi);
    }
    return pairwise_sum(terms);
}

std::vector<double> rough_integral_path_l2(const ControlledPathL2& A, const RoughPathL2& rp) {
    const std::size_t d = rp.dim();
    if (A.m != d || A.d != d || !(A.grid == rp.grid())) {
        throw std::invalid_argument("rough_integral_path_l2: integrand does not match the rough path");
    }
    const std::size_t N = rp.grid().N;
    std::vector<double> out(N + 1, 0.0);
    double acc = 0.0;
    for (std::size_t u = 0; u < N; ++u) {
        const double* X2 = rp.interval(u);
        double xi = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            xi += A.y(u, a) * rp.increment(u, u + 1, a);
            for (std::size_t b = 0; b < d; ++b) xi += A.yp(u, a, b) * X2[b * d + a];
        }
        acc += xi;
        out[u + 1] = acc;
    }
    return out;
}

double controlled_integral(const ControlledPathL2& A, const ControlledPathL2& B, const RoughPathL2& rp,
                           std::size_t s, std::size_t t, std::size_t stride) {
    const std::size_t d = rp.dim();
    if (A.m != B.m || A.d != d || B.d != d || !(A.grid == rp.grid()) || !(B.grid == rp.grid())) {
        throw std::invalid_argument("controlled_integral: dimension or grid mismatch");
    }
    check_stride(s, t, stride, rp.grid().N);
    const std::size_t m = A.m;
    std::vector<double> X2(d * d), terms;
    for (std::size_t u = s; u < t; u += stride) {
        const std::size_t v = u + stride;
        rp.level2(u, v, X2);
        double xi = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            xi += A.y(u, a) * (B.y(v, a) - B.y(u, a));
            for (std::size_t b = 0; b < d; ++b) {
                for (std::size_t c = 0; c < d; ++c) xi += A.yp(u, a, b) * B.yp(u, a, c) * X2[b * d + c];
            }
        }
        terms.push_back(xi);
    }
    return pairwise_sum(terms);
}

RoughPathL2 lift_controlled_l2(const ControlledPathL2& cp, const RoughPathL2& rp) {
    const std::size_t d = rp.dim();
    const std::size_t m = cp.m;
    if (cp.d != d || !(cp.grid == rp.grid())) {
        throw std::invalid_argument("lift_controlled_l2: controlled path does not match the rough path");
    }
    const std::size_t N = rp.grid().N;
    SampledPath Y(rp.grid(), m);
    Y.values = cp.Y;
    Y.centred = false;
    std::vector<double> A(N * m * m, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
        const double* X2 = rp.interval(j);
        double* blk = A.data() + j * m * m;
        for (std::size_t e = 0; e < m; ++e) {
            for (std::size_t f = 0; f < m; ++f) {
                double v = 0.0;
                for (std::size_t b = 0; b < d; ++b) {
                    for (std::size_t c = 0; c < d; ++c) v += cp.yp(j, e, b) * cp.yp(j, f, c) * X2[b * d + c];
                }
                blk[e * m + f] = v;
            }
        }
    }
    return RoughPathL2(std::move(Y), std::move(A), rp.scheme());
}

std::vector<double> renorm_of_integral(std::span<const double> K, std::span<const double> G_X) {
    std::vector<double> K2(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) K2[i] = K[i] * K[i];
    return young_integral_path(K2, G_X, YoungRule::left);
}

double consistency_residual(const ControlledPathL2& Z, const ControlledPathL2& Y, const RoughPathL2& rp,
                            std::size_t stride) {
    if (Z.m != Y.m || Z.d != Y.m) {
        throw std::invalid_argument("consistency_residual: Z must be a covector integrand controlled by Y");
    }
    const RoughPathL2 lifted = lift_controlled_l2(Y, rp);
    const std::size_t N = rp.grid().N;
    const double lhs = rough_integral_l2(Z, lifted, 0, N, stride);

    ControlledPathL2 A(rp.grid(), Y.m, rp.dim());
    A.Y = Z.Y;
    for (std::size_t t = 0; t <= N; ++t) {
        for (std::size_t a = 0; a < Y.m; ++a) {
            for (std::size_t b = 0; b < rp.dim(); ++b) {
                double v = 0.0;
                for (std::size_t e = 0; e < Y.m; ++e) v += Z.yp(t, a, e) * Y.yp(t, e, b);
                A.yp(t, a, b) = v;
            }
        }
    }
    const double rhs = controlled_integral(A, Y, rp, 0, N, stride);
    return std::abs(lhs - rhs);
}

ControlledPathL2 integral_controlled_l2(const ControlledPathL2& K, const RoughPathL2& rp) {
    const std::size_t d = rp.dim();
    ControlledPathL2 Z(rp.grid(), 1, d);
    Z.Y = rough_integral_path_l2(K, rp);
    for (std::size_t t = 0; t <= rp.grid().N; ++t) {
        for (std::size_t b = 0; b < d; ++b) Z.yp(t, 0, b) = K.y(t, b);
    }
    return Z;
}

double associativity_residual(const ControlledPathL2& Y, const ControlledPathL2& K, const RoughPathL2& rp,
                              std::size_t stride) {
    const std::size_t d = rp.dim();
    if (Y.m != 1 || Y.d != d || K.m != d || K.d != d) {
        throw std::invalid_argument("associativity_residual: expected scalar Y and covector K");
    }
    const std::size_t N = rp.grid().N;
    const ControlledPathL2 Z = integral_controlled_l2(K, rp);
    const double lhs = controlled_integral(Y, Z, rp, 0, N, stride);

    ControlledPathL2 A(rp.grid(), d, d);
    for (std::size_t t = 0; t <= N; ++t) {
        const double y = Y.y(t, 0);
        for (std::size_t a = 0; a < d; ++a) {
            A.y(t, a) = y * K.y(t, a);
            for (std::size_t b = 0; b < d; ++b) A.yp(t, a, b) = Y.yp(t, 0, b) * K.y(t, a) + y * K.yp(t, a, b);
        }
    }
    const double rhs = rough_integral_l2(A, rp, 0, N, stride);
    return std::abs(lhs - rhs);
}

void write_rde_csv(std::ostream& os, const RdeSolution& sol) {
    const auto& p = sol.path;
    std::vector<std::string> header{"t"};
    if (p.m == 1 && p.d == 1) {
        header.push_back("Y");
        header.push_back("Yprime");
    } else {
        for (std::size_t a = 0; a < p.m; ++a) header.push_back("Y" + std::to_string(a + 1));
        for (std::size_t a = 0; a < p.m; ++a) {
            for (std::size_t b = 0; b < p.d; ++b) {
                header.push_back("Yprime" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
            }
        }
    }
    write_csv_header(os, header);
    std::vector<double> row;
    for (std::size_t t = 0; t <= p.grid.N; ++t) {
        row.assign(1, p.grid.time(t));
        for (std::size_t a = 0; a < p.m; ++a) row.push_back(p.y(t, a));
        for (std::size_t a = 0; a < p.m; ++a) {
            for (std::size_t b = 0; b < p.d; ++b) row.push_back(p.yp(t, a, b));
        }
        write_csv_row(os, row);
    }
}

}  // namespace roughlab
