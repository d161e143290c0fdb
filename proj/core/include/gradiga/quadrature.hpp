#pragma once

#include <array>
#include <vector>

namespace gradiga {

/// One-dimensional Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> points;
    std::vector<double> weights;
};

/// n-point rule (n >= 1), exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(int n);

/// Tensor-product rule on [-1,1]^dim; points stored as (xi_0, xi_1, xi_2) with
/// unused coordinates zero.
struct QuadratureRule {
    int dim = 0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

QuadratureRule tensor_rule(int dim, int points_per_direction);

}  // namespace gradiga
