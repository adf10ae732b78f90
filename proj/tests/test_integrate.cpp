#include <catch2/catch_amalgamated.hpp>

#include "roughlab/integrate.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

using namespace roughlab;

namespace {

SampledPath smooth_path(const Grid& g) {
    SampledPath X(g, 1);
    for (std::size_t i = 0; i <= g.N; ++i) X.at(i) = std::sin(3.0 * g.time(i)) + 0.5 * g.time(i);
    return X;
}

// Composite Simpson rule for int_0^T f(t) dt.
template <class F>
double simpson(F&& f, double T, int n) {
    const double h = T / n;
    double acc = f(0.0) + f(T);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("pairwise sum agrees with long double accumulation", "[integrate]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(10007);
    for (auto& x : v) x = u(rng);
    long double ref = 0.0L;
    for (double x : v) ref += x;
    CHECK(std::abs(pairwise_sum(v) - static_cast<double>(ref)) <= 1e-12);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("rate fit recovers a power law", "[integrate]") {
    const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> d;
    for (double x : h) d.push_back(3.0 * std::pow(x, 1.7));
    CHECK(fit_rate(h, d) == Catch::Approx(1.7).epsilon(1e-12));
    CHECK(fit_rate({0.1}, {0.2}) == 0.0);
}

TEST_CASE("smooth-path integrals match Riemann-Stieltjes", "[integrate]") {
    const Grid g(2.0, 4096);
    const SampledPath X = smooth_path(g);
    const RoughPath1D rp = geometric_lift(X, 0.3);
    const ControlledPath cosx = markovian_controlled(sine_function(), rp);
    const double rs = simpson([](double t) {
        const double x = std::sin(3.0 * t) + 0.5 * t;
        return std::cos(x) * (3.0 * std::cos(3.0 * t) + 0.5);
    }, 2.0, 20000);
    const IntegralResult r = rough_integral(cosx, rp, 0, g.N, {1, 2, 4, 8});
    CHECK(std::abs(r.value - rs) <= 1e-8);
    CHECK(std::abs(r.value - (std::sin(X(g.N)) - std::sin(X(0)))) <= 1e-8);
    CHECK(r.rate_estimate > 2.5);
    CHECK(r.converged);

    const ControlledPath sq = polynomial_controlled({0.0, 0.0, 1.0}, rp);
    CHECK(rough_integral(sq, rp, 0, g.N).value == Catch::Approx(std::pow(X(g.N), 3) / 3.0).epsilon(1e-12));
}

TEST_CASE("hermite compensated sums of x telescope", "[integrate]") {
    // sum x_u X_{u,v} + X^2_{u,v} = (x_t^2 - x_s^2)/2 + (G_t - G_s)
    const Grid g(1.0, 500);
    const auto X = simulate_bm(g, 5, 0);
    const auto V = variance_fn(NoiseModel::bm(), g);
    const RoughPath1D rp = hermite_lift(X, V, 0.45);
    const ControlledPath cp = polynomial_controlled({0.0, 1.0}, rp);
    for (std::size_t stride : {1u, 5u, 50u}) {
        CHECK(compensated_sum(cp, rp, 0, 500, stride) == Catch::Approx(0.5 * X(500) * X(500) - 0.5).margin(1e-12));
    }
    CHECK_THROWS(compensated_sum(cp, rp, 0, 500, 3));
    CHECK_THROWS(compensated_sum(cp, rp, 10, 5));
}

TEST_CASE("level tables reproduce the generic sums", "[integrate]") {
    const Grid g(1.0, 256);
    const RoughPath1D rp = hermite_lift(simulate_fbm(g, 0.4, 1, 0), variance_fn(NoiseModel::fbm(0.4), g), 0.3);
    const StepLevels L = step_levels(rp, 5);
    CHECK(L.width == 6);
    const ControlledPath cp = polynomial_controlled({1.0, -1.0, 0.5, 2.0}, rp);
    CHECK(compensated_sum(cp, L, 10, 200) == compensated_sum(cp, rp, 10, 200));
    const PiecewiseControlledPath sig = signature_integrand_at(rp, 3, 64);
    CHECK(compensated_sum(sig, L, 0, 256) == Catch::Approx(rough_integral(sig, rp, 0, 256).value).epsilon(1e-14));
    CHECK_THROWS(compensated_sum(cp, step_levels(rp, 2), 0, 10));
}

TEST_CASE("signature integrals add one level", "[integrate]") {
    // int_s^t X^n_{s,r} dX_r, compensated, equals X^{n+1}_{s,t} by Chen
    const Grid g(1.0, 128);
    const RoughPath1D rp = hermite_lift(simulate_fbm(g, 0.4, 2, 0), variance_fn(NoiseModel::fbm(0.4), g), 0.3);
    for (int n = 1; n <= 4; ++n) {
        const auto sig = signature_integrand_at(rp, n, 32);
        CHECK(rough_integral(sig, rp, 0, 128).value == Catch::Approx(rp.level(n + 1, 32, 128)).margin(1e-12));
    }
}

TEST_CASE("young integrals", "[integrate]") {
    const std::size_t n = 1000;
    std::vector<double> f(n + 1), g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        f[i] = t;
        g[i] = t * t;
    }
    // int t d(t^2) = 2/3
    CHECK(young_integral(f, g, YoungRule::trapezoid) == Catch::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(young_integral(f, g, YoungRule::left) < 2.0 / 3.0);
    CHECK(young_integral(f, g, YoungRule::right) > 2.0 / 3.0);
    // left + right = 2 trapezoid
    CHECK(young_integral(f, g, YoungRule::left) + young_integral(f, g, YoungRule::right) ==
          Catch::Approx(2.0 * young_integral(f, g, YoungRule::trapezoid)));
    const auto path = young_integral_path(f, g);
    CHECK(path.back() == Catch::Approx(young_integral(f, g)));
    CHECK(path[500] == Catch::Approx(young_integral(std::span(f).first(501), std::span(g).first(501))));
    const IntegralResult d = young_integral_diagnostic(f, g);
    CHECK(d.refinement_levels.size() == 2);
    CHECK(std::abs(d.refinement_levels[0].second - d.refinement_levels[1].second) ==
          Catch::Approx(0.5 / n).epsilon(0.05));
    CHECK_THROWS(young_integral(f, std::vector<double>(3)));
}

TEST_CASE("simple integrands", "[integrate]") {
    const Grid g(1.0, 10);
    const auto X = simulate_bm(g, 2, 0);
    const SimpleIntegrand h{0.5, 2, 7};
    CHECK(simple_integral(h, X, 0, 10) == Catch::Approx(0.5 * (X(7) - X(2))));
    CHECK(simple_integral(h, X, 4, 10) == Catch::Approx(0.5 * (X(7) - X(4))));
    CHECK(simple_integral(h, X, 8, 10) == 0.0);
    CHECK_THROWS(simple_integral(SimpleIntegrand{1.0, 5, 3}, X, 0, 10));
    CHECK_THROWS(simple_integral(SimpleIntegrand{std::nan(""), 1, 3}, X, 0, 10));
}

TEST_CASE("rough ito formula holds exactly for low-degree polynomials", "[integrate]") {
    const Grid g(1.0, 256);
    const auto X = simulate_bm(g, 4, 0);
    const RoughPath1D herm = hermite_lift(X, variance_fn(NoiseModel::bm(), g), 0.45);
    const RoughPath1D ito = ito_lift(X, 0.45);
    for (const RoughPath1D* rp : {&herm, &ito}) {
        for (double r : ito_residual(polynomial_function({0, 0, 1}), *rp)) CHECK(std::abs(r) <= 1e-12);
    }
    const RoughPath1D herm3 = hermite_lift(X, variance_fn(NoiseModel::bm(), g), 0.3);
    for (double r : ito_residual(polynomial_function({0, 0, 0, 1}), herm3)) CHECK(std::abs(r) <= 1e-12);
    // smooth but non-polynomial functions converge
    std::vector<double> sup;
    for (std::size_t stride : {16u, 4u, 1u}) {
        const auto Xs = X.subsample(stride);
        const RoughPath1D rp = hermite_lift(Xs, variance_fn(NoiseModel::bm(), Xs.grid), 0.3);
        double m = 0.0;
        for (double r : ito_residual(sine_function(), rp)) m = std::max(m, std::abs(r));
        sup.push_back(m);
    }
    CHECK(sup[1] < sup[0]);
    CHECK(sup[2] < sup[1]);
}

TEST_CASE("time-dependent functions use the drift term", "[integrate]") {
    // F(t, x) = t x, D_t F = x, D_x F = t
    DerivativeTable F;
    F.max_order = 3;
    F.dx = [](double t, double x, int order) { return order == 0 ? t * x : order == 1 ? t : 0.0; };
    F.dt = [](double, double x) { return x; };
    const Grid g(1.0, 2048);
    const SampledPath X = smooth_path(g);
    const RoughPath1D rp = geometric_lift(X, 0.45);
    double worst = 0.0;
    for (double r : ito_residual(F, rp, YoungRule::trapezoid)) worst = std::max(worst, std::abs(r));
    // the rough sum is a left Riemann sum for int t dX
    CHECK(worst <= 1.0 / g.N);
}

TEST_CASE("integral as a controlled path", "[integrate]") {
    const Grid g(1.0, 64);
    const RoughPath1D rp = hermite_lift(simulate_bm(g, 8, 0), variance_fn(NoiseModel::bm(), g), 0.3);
    const ControlledPath cp = polynomial_controlled({0.0, 1.0, 1.0}, rp);
    const ControlledPath z = integral_as_controlled(cp, rp);
    const auto running = rough_integral_path(cp, rp);
    CHECK(z.Y[0] == running);
    CHECK(z.Y[1] == cp.Y[0]);
    CHECK(z.Y[2] == cp.Y[1]);
    CHECK(running[64] == Catch::Approx(rough_integral(cp, rp, 0, 64).value).epsilon(1e-13));

    const auto sig = signature_integrand_at(rp, 1, 16);
    const ControlledPath zs = integral_as_controlled(sig, rp, 0);
    for (std::size_t t = 16; t <= 64; ++t) CHECK(zs.Y[0][t] == Catch::Approx(rp.level(2, 16, t)).margin(1e-12));
    CHECK(zs.Y[0][10] == 0.0);
}

TEST_CASE("mismatched integrands are rejected", "[integrate]") {
    const Grid g(1.0, 16);
    const auto X = simulate_bm(g, 1, 0);
    const RoughPath1D a = geometric_lift(X, 0.45);
    const RoughPath1D b = geometric_lift(X, 0.3);
    CHECK_THROWS(rough_integral(polynomial_controlled({1.0}, a), b, 0, 16));
    CHECK_THROWS(rough_integral(polynomial_controlled({1.0}, a), a, 0, 16, {3}));
    CHECK_THROWS(rough_integral(polynomial_controlled({1.0}, a), a, 0, 17));
    CHECK(rough_integral(polynomial_controlled({1.0}, a), a, 4, 4).value == 0.0);
}

TEST_CASE("refinement csv", "[integrate]") {
    IntegralResult r;
    r.refinement_levels = {{1, 2.0}, {2, 2.5}};
    std::stringstream ss;
    write_refinement_csv(ss, r, 0.5);
    CHECK(ss.str() == "mesh,value,diff\n0.5,2,0\n1,2.5,0.5\n");
}
