#include <array>
#include <cmath>
#include <numbers>

#include "gradiga/errors.hpp"
#include "gradiga/quadrature.hpp"

namespace gradiga {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw InvalidInput("gauss_legendre: need at least one point");
    GaussRule rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    // Newton on P_n from the Chebyshev-like initial guess; roots are symmetric.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.points[lo] = -x;
        rule.points[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) rule.points[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

QuadratureRule tensor_rule(int dim, int points_per_direction) {
    if (dim < 0 || dim > 3) throw InvalidInput("tensor_rule: dim must be 0..3");
    const GaussRule g = gauss_legendre(points_per_direction);
    QuadratureRule q;
    q.dim = dim;
    const std::size_t n = g.points.size();
    const std::size_t n1 = dim >= 1 ? n : 1, n2 = dim >= 2 ? n : 1, n3 = dim >= 3 ? n : 1;
    for (std::size_t k = 0; k < n3; ++k) {
        for (std::size_t j = 0; j < n2; ++j) {
            for (std::size_t i = 0; i < n1; ++i) {
                std::array<double, 3> pt{0.0, 0.0, 0.0};
                double w = 1.0;
                if (dim >= 1) pt[0] = g.points[i], w *= g.weights[i];
                if (dim >= 2) pt[1] = g.points[j], w *= g.weights[j];
                if (dim >= 3) pt[2] = g.points[k], w *= g.weights[k];
                q.points.push_back(pt);
                q.weights.push_back(w);
            }
        }
    }
    return q;
}

}  // namespace gradiga
