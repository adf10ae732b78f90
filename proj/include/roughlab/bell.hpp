#pragma once

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace roughlab {

using Rational = boost::rational<std::int64_t>;

// Largest polynomial index supported; n! must fit the rational denominator.
inline constexpr int kMaxBellIndex = 20;

struct BellTerm {
    std::vector<int> exponents;  // p_1..p_k
    Rational coefficient;        // 1 / prod p_m!
    double weight = 0.0;         // coefficient as a double
};

// Ordinary complete Bell polynomial P^{(k)}_n, the coefficient of x^n in
// exp(a_1 x + ... + a_k x^k).  Terms are sorted by increasing coefficient.
struct BellPolynomial {
    int k = 1;
    int n = 0;
    std::vector<BellTerm> terms;
};

// Memoized; the returned reference stays valid for the life of the process.
const BellPolynomial& bell_terms(int k, int n);

double bell_eval(int k, int n, std::span<const double> a);
double bell_eval(const BellPolynomial& poly, std::span<const double> a);

// H_n(x, g) = sum_{p1 + 2 p2 = n} x^p1 g^p2 / (p1! p2!)
double hermite_eval(int n, double x, double g);

// He_n(u) = n! H_n(u, -1/2)
double probabilists_hermite(int n, double u);

// Number of partitions of n into parts of size at most max_part.
std::size_t partition_count(int n, int max_part);

double factorial(int n);

}  // namespace roughlab
