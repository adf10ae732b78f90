#pragma once

#include "roughlab/roughpath.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roughlab {

// Level-2 controlled path with values in R^m over a d-dimensional rough path.
// Y is (N+1) x m, Yp is (N+1) x m x d with Yp[t][a][b] = dY^a / dX^b.
struct ControlledPathL2 {
    Grid grid;
    std::size_t m = 1;
    std::size_t d = 1;
    std::vector<double> Y;
    std::vector<double> Yp;

    ControlledPathL2() = default;
    ControlledPathL2(const Grid& g, std::size_t values, std::size_t driver_dim);

    double y(std::size_t t, std::size_t a) const { return Y[t * m + a]; }
    double& y(std::size_t t, std::size_t a) { return Y[t * m + a]; }
    double yp(std::size_t t, std::size_t a, std::size_t b) const { return Yp[(t * m + a) * d + b]; }
    double& yp(std::size_t t, std::size_t a, std::size_t b) { return Yp[(t * m + a) * d + b]; }
};

// The path X itself with derivative the identity.
ControlledPathL2 identity_controlled(const RoughPathL2& rp);

// f: y (m) -> m x d matrix; df: y -> m x m x d tensor, df[(i*m + j)*d + c] = d f_{ic} / d y_j.
struct VectorField {
    std::size_t m = 1;
    std::size_t d = 1;
    std::function<void(std::span<const double>, std::span<double>)> f;
    std::function<void(std::span<const double>, std::span<double>)> df;
};

VectorField linear_field(double scale = 1.0);  // m = d = 1, f(y) = scale * y

struct RdeSolution {
    ControlledPathL2 path;  // Y and Y' = f(Y)
    Scheme driver_scheme = Scheme::ito;
    bool truncated = false;
    std::size_t valid_until = 0;  // last grid index with a finite state
    std::string diagnostic;
};

RdeSolution solve_rde_davie(const VectorField& field, const std::vector<double>& y0,
                            const RoughPathL2& driver);

// Compensated sum of a covector integrand A (A.m == rp.dim()) against rp on [s,t].
double rough_integral_l2(const ControlledPathL2& A, const RoughPathL2& rp, std::size_t s, std::size_t t,
                         std::size_t stride = 1);
std::vector<double> rough_integral_path_l2(const ControlledPathL2& A, const RoughPathL2& rp);

// sum A_u B_{u,v} + A'_u B'_u X_{u,v}, both controlled by rp.
double controlled_integral(const ControlledPathL2& A, const ControlledPathL2& B, const RoughPathL2& rp,
                           std::size_t s, std::size_t t, std::size_t stride = 1);

// Canonical lift of a controlled path, built from interval blocks Y'_u (x) Y'_u X_{u,u+1}.
RoughPathL2 lift_controlled_l2(const ControlledPathL2& cp, const RoughPathL2& rp);

// G_Z(t) = int_0^t K_u^2 dG_X(u), left-point.
std::vector<double> renorm_of_integral(std::span<const double> K, std::span<const double> G_X);

// |int (Z,Z') dY - int (Z, Z'Y') d(Y,Y')| evaluated with the given stride.
double consistency_residual(const ControlledPathL2& Z, const ControlledPathL2& Y, const RoughPathL2& rp,
                            std::size_t stride = 1);

// Y scalar (m = 1), K covector (m = d).  Z = int K dX at stride 1, Z' = K;
// returns |int (Y,Y') d(Z,Z') - int (YK, Y'K + YK') dX| at the given stride.
double associativity_residual(const ControlledPathL2& Y, const ControlledPathL2& K, const RoughPathL2& rp,
                              std::size_t stride = 1);

ControlledPathL2 integral_controlled_l2(const ControlledPathL2& K, const RoughPathL2& rp);

void write_rde_csv(std::ostream& os, const RdeSolution& sol);

}  // namespace roughlab
