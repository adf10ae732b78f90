#include "roughlab/bell.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace roughlab {

namespace {

std::int64_t int_factorial(int n) {
    std::int64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

void enumerate(int k, int m, int remaining, std::vector<int>& p, std::vector<BellTerm>& out) {
    if (m == 0) {
        if (remaining != 0) return;
        BellTerm term;
        term.exponents = p;
        std::int64_t denom = 1;
        for (int e : p) denom *= int_factorial(e);
        term.coefficient = Rational(1, denom);
        term.weight = 1.0 / static_cast<double>(denom);
        out.push_back(std::move(term));
        return;
    }
    for (int e = remaining / m; e >= 0; --e) {
        p[m - 1] = e;
        enumerate(k, m - 1, remaining - e * m, p, out);
    }
    p[m - 1] = 0;
}

double ipow(double x, int e) {
    double r = 1.0;
    while (e > 0) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

}  // namespace

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

const BellPolynomial& bell_terms(int k, int n) {
    if (k < 1) throw std::invalid_argument("bell_terms: k must be positive");
    if (n < 0 || n > kMaxBellIndex) {
        throw std::invalid_argument("bell_terms: n out of range [0, " +
                                    std::to_string(kMaxBellIndex) + "]");
    }
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<BellPolynomial>> cache;

    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{k, n}];
    if (!slot) {
        auto poly = std::make_unique<BellPolynomial>();
        poly->k = k;
        poly->n = n;
        std::vector<int> p(static_cast<std::size_t>(k), 0);
        enumerate(k, k, n, p, poly->terms);
        std::stable_sort(poly->terms.begin(), poly->terms.end(),
                         [](const BellTerm& a, const BellTerm& b) {
                             return a.coefficient < b.coefficient;
                         });
        slot = std::move(poly);
    }
    return *slot;
}

double bell_eval(const BellPolynomial& poly, std::span<const double> a) {
    if (a.size() != static_cast<std::size_t>(poly.k)) {
        throw std::invalid_argument("bell_eval: expected " + std::to_string(poly.k) +
                                    " arguments, got " + std::to_string(a.size()));
    }
    double sum = 0.0;
    for (const auto& term : poly.terms) {
        double v = term.weight;
        for (std::size_t m = 0; m < a.size(); ++m) {
            if (term.exponents[m] != 0) v *= ipow(a[m], term.exponents[m]);
        }
        sum += v;
    }
    return sum;
}

double bell_eval(int k, int n, std::span<const double> a) {
    return bell_eval(bell_terms(k, n), a);
}

double hermite_eval(int n, double x, double g) {
    if (n < 0) throw std::invalid_argument("hermite_eval: negative index");
    double sum = 0.0;
    for (int p2 = n / 2; p2 >= 0; --p2) {
        const int p1 = n - 2 * p2;
        sum += ipow(x, p1) * ipow(g, p2) / (factorial(p1) * factorial(p2));
    }
    return sum;
}

double probabilists_hermite(int n, double u) {
    return factorial(n) * hermite_eval(n, u, -0.5);
}

std::size_t partition_count(int n, int max_part) {
    if (n < 0) return 0;
    std::vector<std::size_t> ways(static_cast<std::size_t>(n) + 1, 0);
    ways[0] = 1;
    for (int part = 1; part <= max_part; ++part) {
        for (int v = part; v <= n; ++v) ways[v] += ways[v - part];
    }
    return ways[n];
}

}  // namespace roughlab
