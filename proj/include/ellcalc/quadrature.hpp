#pragma once

// Fixed-order Gauss-Legendre quadrature. Nodes and weights are computed once
// per order by Newton iteration on the Legendre recurrence and cached.

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace ellcalc {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace quad {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

inline Rule compute_rule(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    constexpr double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

inline const Rule& rule(int n) {
    static std::map<int, Rule>* cache = new std::map<int, Rule>;
    static std::mutex* mu = new std::mutex;
    std::lock_guard<std::mutex> lock(*mu);
    auto it = cache->find(n);
    if (it == cache->end()) it = cache->emplace(n, compute_rule(n)).first;
    return it->second;
}

}  // namespace quad

template <typename F>
double gauss_legendre(F&& f, double lo, double hi, int n) {
    const quad::Rule& r = quad::rule(n);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return half * s;
}

}  // namespace ellcalc
