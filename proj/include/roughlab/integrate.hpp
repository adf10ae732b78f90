#pragma once

#include "roughlab/controlled.hpp"
#include "roughlab/roughpath.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace roughlab {

inline constexpr double kConvergenceTolerance = 1e-6;

struct IntegralResult {
    double value = 0.0;
    // (mesh stride in grid steps, compensated sum), finest first.
    std::vector<std::pair<std::size_t, double>> refinement_levels;
    double rate_estimate = 0.0;
    bool converged = false;
};

double pairwise_sum(std::span<const double> v);

// Least-squares slope of log|diff| against log(mesh); diffs[j] compares mesh[j] and mesh[j+1].
double fit_rate(const std::vector<double>& meshes, const std::vector<double>& diffs);

// Compensated sum sum_u sum_i Y^(i)_u X^i_{u,v} over [s,t] with the given stride.
double compensated_sum(const ControlledPath& cp, const RoughPath1D& rp, std::size_t s, std::size_t t,
                       std::size_t stride = 1);

// Sorted, de-duplicated strides; throws unless each divides span.
std::vector<std::size_t> sorted_meshes(std::vector<std::size_t> meshes, std::size_t span);
// values[j] is the sum at stride meshes[j], meshes ascending.
IntegralResult summarize(const std::vector<std::size_t>& meshes, const std::vector<double>& values, double dt);

// Levels 0..max_level of every unit interval [u, u+1], row-major.
struct StepLevels {
    std::size_t width = 1;
    std::vector<double> values;

    const double* at(std::size_t u) const { return values.data() + u * width; }
};

StepLevels step_levels(const RoughPath1D& rp, int max_level);

// Stride-1 compensated sums reading levels from a precomputed table.
double compensated_sum(const ControlledPath& cp, const StepLevels& levels, std::size_t s, std::size_t t);
double compensated_sum(const PiecewiseControlledPath& cp, const StepLevels& levels, std::size_t s,
                       std::size_t t);

IntegralResult rough_integral(const ControlledPath& cp, const RoughPath1D& rp, std::size_t s,
                              std::size_t t, std::vector<std::size_t> mesh_levels = {1});
IntegralResult rough_integral(const PiecewiseControlledPath& cp, const RoughPath1D& rp, std::size_t s,
                              std::size_t t, std::vector<std::size_t> mesh_levels = {1});
double simple_integral(const SimpleIntegrand& h, const SampledPath& X, std::size_t s, std::size_t t);

// Running integral t -> int_0^t Y dX at stride 1.
std::vector<double> rough_integral_path(const ControlledPath& cp, const RoughPath1D& rp);

enum class YoungRule { left, right, trapezoid };

double young_integral(std::span<const double> f, std::span<const double> g,
                      YoungRule rule = YoungRule::left);
std::vector<double> young_integral_path(std::span<const double> f, std::span<const double> g,
                                        YoungRule rule = YoungRule::left);
// Left sum at stride 1 and stride 2 with their difference.
IntegralResult young_integral_diagnostic(std::span<const double> f, std::span<const double> g);

// Residual path of the rough Ito formula for F over rp.
std::vector<double> ito_residual(const DerivativeTable& F, const RoughPath1D& rp,
                                 YoungRule rule = YoungRule::right);

// (int Y dX, Y^(1), ..., Y^(k-1)) from the running integral at stride 1.
ControlledPath integral_as_controlled(const ControlledPath& cp, const RoughPath1D& rp);
ControlledPath integral_as_controlled(const PiecewiseControlledPath& cp, const RoughPath1D& rp,
                                      std::size_t from);

void write_refinement_csv(std::ostream& os, const IntegralResult& r, double dt);

}  // namespace roughlab
