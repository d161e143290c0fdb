#pragma once

// Single-patch tensor-product NURBS geometry: isoparametric map, physical
// basis derivatives up to second order, quadrature and boundary entities.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gradiga/quadrature.hpp"
#include "gradiga/splines.hpp"

namespace gradiga {

using Point3 = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

class Patch {
public:
    /// Control points and weights are numbered lexicographically, first
    /// direction fastest. Physical coordinates beyond `dim` are ignored.
    Patch(int dim, std::vector<KnotVector> knot_vectors, std::vector<Point3> control_points,
          std::vector<double> weights);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const KnotVector& knot_vector(int d) const { return knots_[static_cast<std::size_t>(d)]; }
    /// Uniform degree across directions.
    [[nodiscard]] int degree() const noexcept { return knots_.front().degree(); }
    [[nodiscard]] int num_basis(int d) const noexcept { return counts_[static_cast<std::size_t>(d)]; }
    [[nodiscard]] std::size_t num_functions() const noexcept { return control_points_.size(); }
    [[nodiscard]] const std::vector<Point3>& control_points() const noexcept { return control_points_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] std::size_t function_index(std::array<int, 3> ijk) const noexcept;
    [[nodiscard]] std::array<int, 3> function_ijk(std::size_t a) const noexcept;

    [[nodiscard]] int num_elements(int d) const noexcept { return elements_[static_cast<std::size_t>(d)]; }
    [[nodiscard]] std::size_t num_elements() const noexcept;
    /// Element position per direction (index into knot_vector(d).spans()).
    [[nodiscard]] std::array<int, 3> element_position(std::size_t e) const noexcept;
    [[nodiscard]] std::size_t element_index(std::array<int, 3> pos) const noexcept;
    /// Knot span index per direction.
    [[nodiscard]] std::array<int, 3> element_spans(std::size_t e) const noexcept;
    /// Parametric box [lo, hi] per direction.
    [[nodiscard]] std::array<std::array<double, 2>, 3> element_box(std::size_t e) const noexcept;
    /// Global function indices supported on element e, lexicographic.
    [[nodiscard]] std::vector<std::size_t> element_functions(std::size_t e) const;
    [[nodiscard]] std::size_t num_local_functions() const noexcept;

    /// Maps reference coordinates in [-1,1]^dim to the element's parametric box.
    [[nodiscard]] Point3 parametric_point(std::size_t e, const Point3& ref) const noexcept;
    /// Jacobian determinant of that affine map.
    [[nodiscard]] double parametric_scale(std::size_t e) const noexcept;
    /// Element containing the parametric point (domain end belongs to the last element).
    [[nodiscard]] std::size_t locate(const Point3& xi) const;

private:
    int dim_;
    std::vector<KnotVector> knots_;
    std::vector<Point3> control_points_;
    std::vector<double> weights_;
    std::array<int, 3> counts_{1, 1, 1};
    std::array<int, 3> elements_{1, 1, 1};
};

/// Axis-aligned box [origin, origin+extents] with uniform open knot vectors on
/// [0,1] and control points at the Greville abscissae (affine map, unit weights).
Patch make_box_patch(int dim, const Point3& origin, const Point3& extents, const std::array<int, 3>& elements,
                     int degree);

struct MapEval {
    Point3 x{};
    /// dx_k/dxi_alpha; padded with the identity for unused directions.
    Matrix3 jacobian{};
    /// d2x_k/dxi_alpha dxi_beta, indexed [k][alpha][beta].
    std::array<Matrix3, 3> hessian{};
    double det = 1.0;
};

/// x, dx/dxi and d2x/dxi2 at parametric point xi inside element e.
MapEval geometry_map(const Patch& patch, std::size_t element, const Point3& xi);

/// Basis functions of one element in physical space.
struct PhysicalBasis {
    std::vector<std::size_t> functions;
    std::vector<double> values;
    std::vector<Point3> grad;
    std::vector<Matrix3> hess;
    MapEval map;
    /// d xi_alpha / d X_J (inverse of the map Jacobian).
    Matrix3 inverse_jacobian{};

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Throws ElementInversion when det(dx/dxi) <= 0.
PhysicalBasis physical_basis(const Patch& patch, std::size_t element, const Point3& xi);

/// (p+1) Gauss points per direction, plus `extra`.
QuadratureRule make_quadrature(const Patch& patch, int extra = 0);

/// Face (one parametric coordinate pinned) or edge (two pinned) of the patch.
struct BoundaryEntity {
    enum class Kind { face, edge };
    Kind kind = Kind::face;
    /// e.g. "x-", "z+", "x+z+"
    std::string name;
    /// -1 free, 0 lower end, 1 upper end, per direction
    std::array<int, 3> pinned{-1, -1, -1};
    /// Edges: indices of the two adjacent faces in the enumerate_boundary list.
    std::vector<std::size_t> adjacent_faces;
};

/// 2*dim faces, then (dim == 3) 12 edges.
std::vector<BoundaryEntity> enumerate_boundary(const Patch& patch);

/// Parses "x-", "y+z-", "x-y-z-" (point) into a pinned pattern; throws InvalidInput.
std::array<int, 3> parse_selector(const std::string& name, int dim);

/// Selector string for a pinned pattern.
std::string selector_name(const std::array<int, 3>& pinned);

/// Pointwise face geometry.
struct FacePoint {
    Point3 normal{};
    /// dS per unit parametric area of the free directions.
    double area_factor = 0.0;
    /// Element extent along the normal.
    double element_size = 0.0;
};

FacePoint face_geometry(const Patch& patch, std::size_t element, int pinned_direction, int side, const MapEval& map);

/// Quadrature point on a boundary entity, with the adjacent element.
struct BoundaryQuadPoint {
    std::size_t element = 0;
    Point3 xi{};
    /// Includes the reference weight, parametric scaling and the measure factor.
    double weight = 0.0;
    Point3 normal{};
    double element_size = 0.0;
};

/// Elements adjacent to the entity, each with its quadrature points.
struct BoundaryElement {
    std::size_t element = 0;
    std::vector<BoundaryQuadPoint> points;
};

std::vector<BoundaryElement> boundary_quadrature(const Patch& patch, const BoundaryEntity& entity, int extra = 0);

/// Control points (global function indices) lying on the entity described by
/// the pinned pattern; these interpolate the boundary for open knot vectors.
std::vector<std::size_t> boundary_functions(const Patch& patch, const std::array<int, 3>& pinned);

}  // namespace gradiga
