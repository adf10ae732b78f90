#include <catch2/catch_amalgamated.hpp>

#include "roughlab/controlled.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace roughlab;

TEST_CASE("polynomial helpers", "[controlled]") {
    const std::vector<double> c{1.0, -2.0, 0.0, 3.0};
    CHECK(polynomial_value(c, 2.0) == Catch::Approx(1.0 - 4.0 + 24.0));
    CHECK(polynomial_derivative(c) == std::vector<double>{-2.0, 0.0, 9.0});
    CHECK(polynomial_derivative({5.0}).empty());
    CHECK(polynomial_value({}, 3.0) == 0.0);
    const DerivativeTable F = polynomial_function(c);
    CHECK(F.dx(0.0, 2.0, 1) == Catch::Approx(-2.0 + 36.0));
    CHECK(F.dx(0.0, 2.0, 3) == Catch::Approx(18.0));
    CHECK(F.dx(0.0, 2.0, 4) == 0.0);
    const DerivativeTable S = sine_function();
    CHECK(S.dx(0.0, 0.3, 5) == Catch::Approx(std::cos(0.3)));
    CHECK(S.dx(0.0, 0.3, 2) == Catch::Approx(-std::sin(0.3)));
}

TEST_CASE("polynomial integrands carry successive derivatives", "[controlled]") {
    const Grid g(1.0, 30);
    const RoughPath1D rp = hermite_lift(simulate_bm(g, 2, 0), variance_fn(NoiseModel::bm(), g), 0.3);
    const std::vector<double> c{0.5, 1.0, -1.0, 2.0};
    const ControlledPath cp = polynomial_controlled(c, rp);
    REQUIRE(cp.components() == 3);
    for (std::size_t t : {0u, 11u, 30u}) {
        const double x = rp.x(t);
        CHECK(cp(1, t) == Catch::Approx(0.5 + x - x * x + 2 * x * x * x));
        CHECK(cp(2, t) == Catch::Approx(1.0 - 2 * x + 6 * x * x));
        CHECK(cp(3, t) == Catch::Approx(-2.0 + 12 * x));
    }
    const ControlledPath m = markovian_controlled(polynomial_function({0.0, 0.5, 0.5, -1.0 / 3.0, 0.5}), rp);
    // markovian components start at D F, so they match the integrand F'
    for (std::size_t t = 0; t <= g.N; ++t) {
        for (int i = 1; i <= 3; ++i) CHECK(m(i, t) == Catch::Approx(cp(i, t)).margin(1e-12));
    }
}

TEST_CASE("taylor remainder vanishes for low-degree polynomials on geometric lifts", "[controlled]") {
    const Grid g(1.0, 60);
    const RoughPath1D rp = geometric_lift(simulate_fbm(g, 0.4, 3, 0), 0.3);
    const auto exact = remainder_profile(polynomial_controlled({0.3, -1.0, 2.0}, rp), rp);
    for (double r : exact) CHECK(r <= 1e-9);
    const auto generic = remainder_profile(polynomial_controlled({0.0, 0.0, 0.0, 0.0, 1.0}, rp), rp);
    CHECK(generic[0] > 1e-6);
}

TEST_CASE("sine integrand remainders stay bounded under refinement", "[controlled]") {
    // remainders scale like |t-s|^{(k+1-i) alpha}, so the normalised profile does not blow up
    std::vector<double> top;
    for (std::size_t N : {64u, 256u}) {
        const Grid g(1.0, N);
        const auto X = simulate_bm(Grid(1.0, 256), 4, 0).subsample(256 / N);
        const RoughPath1D rp = hermite_lift(X, variance_fn(NoiseModel::bm(), g), 0.45);
        top.push_back(remainder_profile(markovian_controlled(sine_function(), rp), rp)[0]);
    }
    CHECK(top[1] <= 3.0 * top[0]);
}

TEST_CASE("signature integrands follow Chen", "[controlled]") {
    const Grid g(1.0, 40);
    const RoughPath1D rp = hermite_lift(simulate_fbm(g, 0.4, 7, 0), variance_fn(NoiseModel::fbm(0.4), g), 0.3);
    const PiecewiseControlledPath whole = signature_integrand_at(rp, 1, 0);
    REQUIRE(whole.segments.size() == 1);
    for (double r : remainder_profile(whole.segments[0], rp)) CHECK(r <= 1e-10);

    const PiecewiseControlledPath late = signature_integrand(rp, 2, 0.25);
    REQUIRE(late.breakpoints == std::vector<std::size_t>{0, 10, 40});
    const ControlledPath& after = late.segments[1];
    CHECK(after.components() == 3);
    for (std::size_t t = 10; t <= 40; ++t) {
        CHECK(after(1, t) == Catch::Approx(rp.level(2, 10, t)).margin(1e-14));
        CHECK(after(2, t) == Catch::Approx(rp.level(1, 10, t)).margin(1e-14));
        CHECK(after(3, t) == 1.0);
    }
    for (std::size_t t = 0; t <= 10; ++t) CHECK(late.segments[0](1, t) == 0.0);
    CHECK(late.continuous);
    // more components than the lift level
    CHECK(signature_integrand_at(rp, 4, 0).segments[0].components() == 5);
}

TEST_CASE("signature integrand arguments are validated", "[controlled]") {
    const Grid g(1.0, 8);
    const RoughPath1D rp = geometric_lift(simulate_bm(g, 1, 0), 0.45);
    CHECK_THROWS_AS(signature_integrand(rp, 0, 0.5), std::invalid_argument);
    CHECK_NOTHROW(signature_integrand(rp, 0, 0.0));
    CHECK_THROWS(signature_integrand(rp, -1, 0.0));
    CHECK_THROWS(signature_integrand(rp, 1, 0.3));
    CHECK_THROWS(signature_integrand_at(rp, 1, 9));
}

TEST_CASE("piecewise paths reject jumps", "[controlled]") {
    const Grid g(1.0, 8);
    const RoughPath1D rp = geometric_lift(simulate_bm(g, 1, 0), 0.45);
    ControlledPath a = make_controlled(rp, 2);
    ControlledPath b = make_controlled(rp, 2);
    for (auto& v : b.Y[0]) v = 1.0;
    CHECK_THROWS(PiecewiseControlledPath({0, 4, 8}, {a, b}));
    CHECK_THROWS(PiecewiseControlledPath({0, 8}, {a, b}));
    CHECK_THROWS(PiecewiseControlledPath({0, 6, 4, 8}, {a, a, a}));
    CHECK_NOTHROW(PiecewiseControlledPath({0, 4, 8}, {a, a}));
}

TEST_CASE("controlled path arithmetic", "[controlled]") {
    const Grid g(1.0, 10);
    const RoughPath1D rp = hermite_lift(simulate_bm(g, 3, 0), variance_fn(NoiseModel::bm(), g), 0.45);
    const ControlledPath a = polynomial_controlled({1.0, 2.0}, rp);
    const ControlledPath b = polynomial_controlled({0.0, 0.0, 1.0}, rp);
    const ControlledPath c = a + 2.0 * b;
    const ControlledPath d = polynomial_controlled({1.0, 2.0, 2.0}, rp);
    for (int i = 1; i <= 2; ++i) {
        for (std::size_t t = 0; t <= 10; ++t) CHECK(c(i, t) == Catch::Approx(d(i, t)).margin(1e-14));
    }
    const RoughPath1D other = hermite_lift(simulate_bm(Grid(1.0, 12), 3, 0), variance_fn(NoiseModel::bm(), Grid(1.0, 12)), 0.45);
    CHECK_THROWS(a + polynomial_controlled({1.0}, other));
}

TEST_CASE("controlled csv header", "[controlled]") {
    const Grid g(1.0, 2);
    const RoughPath1D rp = geometric_lift(simulate_bm(g, 1, 0), 0.3);
    std::stringstream ss;
    write_controlled_csv(ss, polynomial_controlled({0.0, 1.0}, rp));
    std::string line;
    std::getline(ss, line);
    CHECK(line == "t,Y1,Y2,Y3");
    std::getline(ss, line);
    CHECK(line == "0,0,1,0");
}
