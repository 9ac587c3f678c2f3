#include <nvb/quadrature.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nvb {

LineRule gauss_legendre(int n)
{
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: n must be positive");
    }
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

const QuadratureRule& triangle_rule(int degree)
{
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(degree); it != cache.end()) {
        return it->second;
    }
    if (degree < 0) {
        throw std::invalid_argument("triangle_rule: negative degree");
    }
    // x = u, y = v (1 - u), Jacobian (1 - u): degree + 1 in u, degree in v.
    const int n = (degree + 3) / 2;
    const LineRule g = gauss_legendre(n);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = g.points[i];
            const double v = g.points[j];
            rule.points.push_back({u, v * (1.0 - u)});
            rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
        }
    }
    return cache.emplace(degree, std::move(rule)).first->second;
}

WeightedPoints map_rule(const QuadratureRule& rule, const TrianglePoints& t)
{
    WeightedPoints out;
    out.points.reserve(rule.points.size());
    out.weights.reserve(rule.points.size());
    const Point e1 = t[1] - t[0];
    const Point e2 = t[2] - t[0];
    const double jac = std::abs(cross(e1, e2));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Point r = rule.points[q];
        out.points.push_back(t[0] + r.x * e1 + r.y * e2);
        out.weights.push_back(rule.weights[q] * jac);
    }
    return out;
}

WeightedPoints apex_graded_rule(const TrianglePoints& t, int levels, int n_radial, int n_angular)
{
    const LineRule radial = gauss_legendre(n_radial);
    const LineRule angular = gauss_legendre(n_angular);
    const Point a = t[1] - t[0];
    const Point b = t[2] - t[0];
    const double jac = std::abs(cross(a, b));

    WeightedPoints out;
    out.points.reserve(static_cast<std::size_t>(levels + 1) * n_radial * n_angular);
    out.weights.reserve(out.points.capacity());
    auto layer = [&](double lo, double hi) {
        const double len = hi - lo;
        for (int i = 0; i < n_radial; ++i) {
            const double s = lo + len * radial.points[i];
            const double ws = len * radial.weights[i];
            for (int j = 0; j < n_angular; ++j) {
                const double w = angular.points[j];
                const Point dir = (1.0 - w) * a + w * b;
                out.points.push_back(t[0] + s * dir);
                out.weights.push_back(ws * angular.weights[j] * s * jac);
            }
        }
    };
    double hi = 1.0;
    for (int k = 0; k < levels; ++k) {
        layer(0.5 * hi, hi);
        hi *= 0.5;
    }
    layer(0.0, hi);
    return out;
}

} // namespace nvb
