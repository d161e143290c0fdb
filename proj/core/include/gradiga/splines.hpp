#pragma once

// Univariate B-spline bases on open knot vectors, and rational tensor-product
// composition with first and second parametric derivatives.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace gradiga {

/// Open (clamped) knot vector. Validated on construction.
class KnotVector {
public:
    KnotVector(int degree, std::vector<double> knots);

    /// `num_spans` equal spans on [a, b] with end knots repeated degree+1 times.
    static KnotVector uniform(int degree, int num_spans, double a = 0.0, double b = 1.0);

    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] const std::vector<double>& knots() const noexcept { return knots_; }
    [[nodiscard]] double knot(std::size_t i) const { return knots_[i]; }
    [[nodiscard]] int num_basis() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
    [[nodiscard]] double lower() const noexcept { return knots_[static_cast<std::size_t>(degree_)]; }
    [[nodiscard]] double upper() const noexcept { return knots_[static_cast<std::size_t>(num_basis())]; }
    /// Indices s with knots[s] < knots[s+1], in increasing order.
    [[nodiscard]] const std::vector<int>& spans() const noexcept { return spans_; }
    /// Multiplicity of the knot value at index i.
    [[nodiscard]] int multiplicity(std::size_t i) const;
    /// Greville abscissa of basis function i.
    [[nodiscard]] double greville(int i) const;

private:
    int degree_;
    std::vector<double> knots_;
    std::vector<int> spans_;
};

/// Nonzero basis functions on one knot span. Functions span-p .. span.
struct BasisEval {
    int span = 0;
    std::vector<double> values;
    std::vector<double> d1;
    std::vector<double> d2;
};

/// knots[s] <= xi < knots[s+1]; the domain end maps to the last nonempty span.
int find_span(const KnotVector& kv, double xi);

/// Values and up to two derivatives via the derivative recursion.
BasisEval eval_basis(const KnotVector& kv, double xi, int nderiv = 2);

/// Same, on a caller-chosen span (one-sided evaluation at span ends).
BasisEval eval_basis_on_span(const KnotVector& kv, int span, double xi, int nderiv = 2);

/// Rational tensor-product basis on one element: N^a, dN^a/dxi_alpha and
/// d2N^a/dxi_alpha dxi_beta for the local functions, lexicographic with the
/// first direction fastest. Unused directions (dim < 3) carry zeros.
struct RationalBasis {
    int dim = 0;
    std::vector<double> values;
    std::vector<std::array<double, 3>> grad;
    std::vector<std::array<std::array<double, 3>, 3>> hess;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// `weights` holds the local weights in the same lexicographic numbering.
RationalBasis rational_derivatives(std::span<const BasisEval> per_direction, std::span<const double> weights);

}  // namespace gradiga
