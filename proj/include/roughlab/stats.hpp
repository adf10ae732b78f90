#pragma once

#include "roughlab/gauss.hpp"
#include "roughlab/roughpath.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roughlab {

inline constexpr double kRejectionSE = 4.0;
// Largest tolerated fraction of failed paths in a Monte Carlo run.
inline constexpr double kMaxPathErrorRate = 1e-3;

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    // |mean - target| <= z * std_error
    bool consistent_with(double target, double z = kRejectionSE) const;
};

MCEstimate estimate(std::span<const double> samples);

enum class LiftKind { hermite, geometric, ito, custom };
std::string lift_name(LiftKind lift);

struct IntegrandSpec {
    enum class Kind { polynomial, signature, simple };
    Kind kind = Kind::polynomial;
    std::vector<double> coefficients;  // polynomial, ascending powers
    int n = 1;                         // signature level
    double s = 0.0;                    // signature start / simple window start
    double u = 0.0;                    // simple window end; xi = tanh(X_s)
    std::string name;                  // label in reports; generated when empty

    static IntegrandSpec polynomial(std::vector<double> c, std::string label = {});
    static IntegrandSpec signature(int level, double start);
    static IntegrandSpec simple(double start, double end);
    std::string label() const;
};

struct StoppingSpec {
    enum class Kind { terminal, fixed, clock };
    Kind kind = Kind::terminal;
    double value = 0.0;  // fixed time, or clock level in units of -2 G^2

    static StoppingSpec terminal() { return {}; }
    static StoppingSpec fixed(double t) { return {Kind::fixed, t}; }
    static StoppingSpec clock(double level) { return {Kind::clock, level}; }
    std::string label() const;
};

struct ExperimentSpec {
    NoiseModel noise;
    LiftKind lift = LiftKind::hermite;
    std::function<RenormTerms(const SampledPath&)> custom_renorm;
    double alpha = 0.45;
    double T = 1.0;
    std::size_t N = 1024;
    std::size_t M = 100000;
    std::uint64_t seed = 1;
    std::vector<IntegrandSpec> integrands;
    std::vector<StoppingSpec> stoppings{StoppingSpec::terminal()};
    std::size_t workers = 0;
};

// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentSpec& spec);

// Mean of the rough integral of integrand i stopped by stopping j.
MCEstimate mc_integral_mean(const ExperimentSpec& spec, std::size_t integrand, std::size_t stopping);

struct ReportRow {
    std::string noise;
    std::string lift;
    std::string integrand;
    std::string stopping;
    MCEstimate est;
    std::size_t errors = 0;
    bool pass = false;  // mean consistent with 0 at kRejectionSE
};

std::vector<ReportRow> unbiasedness_report(const ExperimentSpec& spec);
void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows, bool header = true);

// Sarmanov-type pair density phi(x)phi(y)[1 + eps(h(x)g(y) - h(y)g(x))].
struct SarmanovSpec {
    double epsilon = 0.3;
    std::function<double(double)> h;
    std::function<double(double)> g;
    double sup_h = 1.0;
    double sup_g = 1.0;

    static SarmanovSpec standard(double epsilon);  // h = sin x, g = sin 2x
};

struct SarmanovSample {
    std::vector<double> x;
    std::vector<double> y;
    double acceptance_rate = 0.0;
};

// Checks positivity and Gaussian mean zero of h and g; throws std::invalid_argument.
void check_sarmanov(const SarmanovSpec& spec);
SarmanovSample sarmanov_sample(const SarmanovSpec& spec, std::size_t M, std::uint64_t seed,
                               std::size_t workers = 0);

// eps * (E h^2 E g^2 - (E h g)^2) * 2 under the standard normal.
double sarmanov_asymmetry(const SarmanovSpec& spec);

struct BalancingProcess {
    enum class Kind { gaussian, sarmanov };
    Kind kind = Kind::gaussian;
    NoiseModel noise;
    SarmanovSpec sarmanov;

    static BalancingProcess gaussian(NoiseModel m) { return {Kind::gaussian, std::move(m), {}}; }
    static BalancingProcess pairs(SarmanovSpec s) { return {Kind::sarmanov, {}, std::move(s)}; }
};

// Cov(X_a, X_b) of a Gaussian noise model started at 0; horizon fixes the time-change clock.
double noise_covariance(const NoiseModel& model, double a, double b, double horizon);

// sum_{i=0}^n E[H_i(X_{s,u}, -(u-s)/2) H_{n-i}(X_{u,t}, -(t-u)/2)]
MCEstimate balancing_residual(const BalancingProcess& process, int n, double s, double u, double t,
                              std::size_t M, std::uint64_t seed, std::size_t workers = 0);

struct MomentRow {
    int n = 0;
    double moment = 0.0;  // sup over the grid of the MC estimate of E|X_t|^n
    double std_error = 0.0;
    double time = 0.0;    // where the sup is attained
    double bound = 0.0;   // ((3 + (-1)^(n+1)) / 2) n! C^n
    double margin = 0.0;  // bound - moment
    bool holds = false;
};

std::vector<MomentRow> moment_bound_check(const NoiseModel& noise, const Grid& grid, int n_max, double C,
                                          std::size_t M, std::uint64_t seed, std::size_t workers = 0);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Kolmogorov distribution tail P(K > lambda).
double kolmogorov_tail(double lambda);
// One-sample KS test against N(0, variance).
KsResult ks_normal(std::span<const double> samples, double variance = 1.0);

}  // namespace roughlab
