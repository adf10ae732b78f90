#pragma once

#include "roughlab/roughpath.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace roughlab {

// Y^(1)..Y^(m) sampled on a grid, over a one-dimensional rough path.  m is
// usually k; signature integrands may carry more components.
struct ControlledPath {
    Grid grid;
    int k = 1;
    std::vector<std::vector<double>> Y;  // Y[i-1] = Y^(i)
    bool regular = true;                 // base renormalisation deterministic

    std::size_t components() const { return Y.size(); }
    double operator()(int i, std::size_t t) const { return Y[i - 1][t]; }
};

ControlledPath make_controlled(const RoughPath1D& rp, std::size_t components);
ControlledPath operator+(const ControlledPath& a, const ControlledPath& b);
ControlledPath operator*(double c, const ControlledPath& a);

struct PiecewiseControlledPath {
    std::vector<std::size_t> breakpoints;   // grid indices, first 0, last N
    std::vector<ControlledPath> segments;   // segment j lives on [b_j, b_{j+1}]
    bool continuous = true;                 // Y^(1) continuous at every breakpoint

    PiecewiseControlledPath() = default;
    PiecewiseControlledPath(std::vector<std::size_t> bps, std::vector<ControlledPath> segs);
};

struct SimpleIntegrand {
    double xi = 0.0;
    std::size_t s = 0;
    std::size_t u = 0;
};

// Space derivatives D_x^(j) F(t, x) for j = 0..max_order and an optional D_t F.
struct DerivativeTable {
    int max_order = 0;
    std::function<double(double, double, int)> dx;
    std::function<double(double, double)> dt;
};

DerivativeTable polynomial_function(std::vector<double> coefficients);
DerivativeTable sine_function();
DerivativeTable exponential_function();

std::vector<double> polynomial_derivative(const std::vector<double>& coefficients);
double polynomial_value(const std::vector<double>& coefficients, double x);

ControlledPath polynomial_controlled(const std::vector<double>& coefficients, const RoughPath1D& rp);
ControlledPath markovian_controlled(const DerivativeTable& F, const RoughPath1D& rp);
PiecewiseControlledPath signature_integrand(const RoughPath1D& rp, int n, double s);
PiecewiseControlledPath signature_integrand_at(const RoughPath1D& rp, int n, std::size_t s);

// Per-level sup over grid pairs of |R^i_{s,t}| / (t-s)^{(k+1-i) alpha}, i = 1..k.
std::vector<double> remainder_profile(const ControlledPath& cp, const RoughPath1D& rp);

void write_controlled_csv(std::ostream& os, const ControlledPath& cp);

}  // namespace roughlab
