#pragma once

#include "roughlab/bell.hpp"
#include "roughlab/gauss.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace roughlab {

inline constexpr double kChenTolerance = 1e-8;

// G^2..G^k sampled on a grid; G[j] holds G^{j+2}.
struct RenormTerms {
    int k = 1;
    Grid grid;
    std::vector<std::vector<double>> G;
    bool deterministic = true;

    RenormTerms() = default;
    RenormTerms(int level, const Grid& g, bool is_deterministic = true);

    double at(int level, std::size_t i) const { return G[level - 2][i]; }
    double increment(int level, std::size_t s, std::size_t t) const {
        return G[level - 2][t] - G[level - 2][s];
    }
    // Per-level total variation over the grid.
    std::vector<double> total_variation() const;
};

int level_from_alpha(double alpha);

// Levels of any index are Bell evaluations; index above kMaxBellIndex is rejected.
class RoughPath1D {
  public:
    RoughPath1D(SampledPath X, RenormTerms G, double alpha);

    int k() const { return k_; }
    double alpha() const { return alpha_; }
    const Grid& grid() const { return X_.grid; }
    const SampledPath& path() const { return X_; }
    const RenormTerms& renorm() const { return G_; }
    double x(std::size_t i) const { return X_.values[i]; }
    double increment(std::size_t s, std::size_t t) const { return X_.values[t] - X_.values[s]; }

    double level(int i, std::size_t s, std::size_t t) const;
    // out[0..out.size()-1] = levels 0..out.size()-1 on (s,t).
    void levels(std::size_t s, std::size_t t, std::span<double> out) const;

  private:
    void arguments(std::size_t s, std::size_t t, std::span<double> a) const;

    SampledPath X_;
    RenormTerms G_;
    double alpha_;
    int k_;
    std::vector<const BellPolynomial*> polys_;
};

RoughPath1D lift_from_renorm(const SampledPath& X, const RenormTerms& G, double alpha);
RoughPath1D hermite_lift(const SampledPath& X, const VarianceFunction& V, double alpha);
RoughPath1D geometric_lift(const SampledPath& X, double alpha);
// G^2 = -1/2 * realised quadratic variation on the grid.
RoughPath1D ito_lift(const SampledPath& X, double alpha);

// Level accessor over a grid: level(i, s, t) for 0 <= i <= k.
struct LevelAccessor {
    int k = 1;
    Grid grid;
    std::function<double(int, std::size_t, std::size_t)> level;
};

LevelAccessor accessor(const RoughPath1D& rp);

struct ChenReport {
    double max_abs = 0.0;
    double scale = 1.0;  // max(1, largest level magnitude seen)
    std::array<std::size_t, 3> worst{0, 0, 0};
    int worst_level = 0;
    double relative() const { return max_abs / scale; }
};

ChenReport chen_residual(const LevelAccessor& acc, std::size_t sample_triples, std::uint64_t seed = 1);
ChenReport chen_residual(const RoughPath1D& rp, std::size_t sample_triples, std::uint64_t seed = 1);

class ChenViolation : public std::runtime_error {
  public:
    ChenViolation(const ChenReport& report, const std::string& what)
        : std::runtime_error(what), report_(report) {}
    const ChenReport& report() const { return report_; }

  private:
    ChenReport report_;
};

// Recovers F^2..F^k from a level accessor; throws ChenViolation when the
// relative Chen residual on sampled triples exceeds kChenTolerance.
RenormTerms extract_renorm(const LevelAccessor& acc, double alpha,
                           std::size_t check_triples = 2000);

double holder_constant(const Grid& grid,
                       const std::function<double(std::size_t, std::size_t)>& values, double gamma);

enum class Scheme { ito, stratonovich, young, hermite };
std::string scheme_name(Scheme s);

// Level-2 rough path in R^d stored as consecutive-interval increments.
class RoughPathL2 {
  public:
    RoughPathL2(SampledPath X, std::vector<double> increments, Scheme scheme);

    std::size_t dim() const { return X_.dim; }
    const Grid& grid() const { return X_.grid; }
    const SampledPath& path() const { return X_; }
    Scheme scheme() const { return scheme_; }
    double increment(std::size_t s, std::size_t t, std::size_t c) const {
        return X_(t, c) - X_(s, c);
    }
    // d x d block for grid interval [j, j+1], entry (a,b) = int X^a dX^b.
    const double* interval(std::size_t j) const { return A_.data() + j * dim() * dim(); }
    // Chen composition of the interval blocks on [s, t]; out is d x d row-major.
    void level2(std::size_t s, std::size_t t, std::span<double> out) const;

  private:
    SampledPath X_;
    std::vector<double> A_;
    Scheme scheme_;
};

RoughPathL2 level2_from_fine(const SampledPath& fine, const Grid& coarse, Scheme scheme);
// Level-2 truncation of a one-dimensional rough path.
RoughPathL2 to_level2(const RoughPath1D& rp);
// Pads a d-dimensional lift with leading zero coordinates for constant assets.
RoughPathL2 zero_extend(const RoughPathL2& rp, std::size_t leading_constant, double constant_value);

// Max over grid intervals and [0,T] of |X2_ab + X2_ba - X_a X_b|.
double geometric_check_l2(const RoughPathL2& rp);
ChenReport chen_residual(const RoughPathL2& rp, std::size_t sample_triples, std::uint64_t seed = 1);
LevelAccessor accessor(const RoughPathL2& rp);  // requires dim 1

void write_levels_csv(std::ostream& os, const RoughPath1D& rp,
                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
void write_renorm_csv(std::ostream& os, const RenormTerms& G);

}  // namespace roughlab
