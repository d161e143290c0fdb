#include "gradiga/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "gradiga/errors.hpp"
#include "gradiga/tensor.hpp"

namespace gradiga {

namespace {

constexpr char kAxis[3] = {'x', 'y', 'z'};

std::size_t as_index(int i) { return static_cast<std::size_t>(i); }

}  // namespace

Patch::Patch(int dim, std::vector<KnotVector> knot_vectors, std::vector<Point3> control_points,
             std::vector<double> weights)
    : dim_(dim), knots_(std::move(knot_vectors)), control_points_(std::move(control_points)), weights_(std::move(weights)) {
    if (dim_ < 1 || dim_ > 3) throw InvalidInput("patch: dim must be 1, 2 or 3");
    if (knots_.size() != as_index(dim_)) throw InvalidInput("patch: need one knot vector per direction");
    std::size_t total = 1;
    for (int d = 0; d < dim_; ++d) {
        const auto& kv = knots_[as_index(d)];
        if (kv.degree() != knots_.front().degree()) throw InvalidInput("patch: degree must be uniform across directions");
        counts_[as_index(d)] = kv.num_basis();
        elements_[as_index(d)] = static_cast<int>(kv.spans().size());
        total *= as_index(kv.num_basis());
    }
    if (control_points_.size() != total) {
        throw InvalidInput("patch: " + std::to_string(control_points_.size()) + " control points for " +
                           std::to_string(total) + " basis functions");
    }
    if (weights_.empty()) weights_.assign(total, 1.0);
    if (weights_.size() != total) throw InvalidInput("patch: weight count does not match control points");
    for (double w : weights_) {
        if (!(w > 0.0)) throw InvalidInput("patch: weights must be strictly positive");
    }
}

std::size_t Patch::function_index(std::array<int, 3> ijk) const noexcept {
    return as_index(ijk[0]) + as_index(counts_[0]) * (as_index(ijk[1]) + as_index(counts_[1]) * as_index(ijk[2]));
}

std::array<int, 3> Patch::function_ijk(std::size_t a) const noexcept {
    const auto n0 = as_index(counts_[0]), n1 = as_index(counts_[1]);
    return {static_cast<int>(a % n0), static_cast<int>((a / n0) % n1), static_cast<int>(a / (n0 * n1))};
}

std::size_t Patch::num_elements() const noexcept {
    return as_index(elements_[0]) * as_index(elements_[1]) * as_index(elements_[2]);
}

std::array<int, 3> Patch::element_position(std::size_t e) const noexcept {
    const auto n0 = as_index(elements_[0]), n1 = as_index(elements_[1]);
    return {static_cast<int>(e % n0), static_cast<int>((e / n0) % n1), static_cast<int>(e / (n0 * n1))};
}

std::size_t Patch::element_index(std::array<int, 3> pos) const noexcept {
    return as_index(pos[0]) + as_index(elements_[0]) * (as_index(pos[1]) + as_index(elements_[1]) * as_index(pos[2]));
}

std::array<int, 3> Patch::element_spans(std::size_t e) const noexcept {
    const auto pos = element_position(e);
    std::array<int, 3> s{0, 0, 0};
    for (int d = 0; d < dim_; ++d) s[as_index(d)] = knots_[as_index(d)].spans()[as_index(pos[as_index(d)])];
    return s;
}

std::array<std::array<double, 2>, 3> Patch::element_box(std::size_t e) const noexcept {
    const auto s = element_spans(e);
    std::array<std::array<double, 2>, 3> box{};
    for (int d = 0; d < dim_; ++d) {
        const auto& kv = knots_[as_index(d)];
        box[as_index(d)] = {kv.knot(as_index(s[as_index(d)])), kv.knot(as_index(s[as_index(d)]) + 1)};
    }
    return box;
}

std::size_t Patch::num_local_functions() const noexcept {
    std::size_t n = 1;
    for (int d = 0; d < dim_; ++d) n *= as_index(degree() + 1);
    return n;
}

std::vector<std::size_t> Patch::element_functions(std::size_t e) const {
    const auto s = element_spans(e);
    const int p = degree();
    const int n0 = p + 1, n1 = dim_ >= 2 ? p + 1 : 1, n2 = dim_ >= 3 ? p + 1 : 1;
    std::vector<std::size_t> out;
    out.reserve(num_local_functions());
    for (int k = 0; k < n2; ++k) {
        for (int j = 0; j < n1; ++j) {
            for (int i = 0; i < n0; ++i) {
                out.push_back(function_index({s[0] - p + i, dim_ >= 2 ? s[1] - p + j : 0, dim_ >= 3 ? s[2] - p + k : 0}));
            }
        }
    }
    return out;
}

Point3 Patch::parametric_point(std::size_t e, const Point3& ref) const noexcept {
    const auto box = element_box(e);
    Point3 xi{0.0, 0.0, 0.0};
    for (std::size_t d = 0; d < as_index(dim_); ++d) {
        xi[d] = box[d][0] + 0.5 * (ref[d] + 1.0) * (box[d][1] - box[d][0]);
    }
    return xi;
}

double Patch::parametric_scale(std::size_t e) const noexcept {
    const auto box = element_box(e);
    double s = 1.0;
    for (std::size_t d = 0; d < as_index(dim_); ++d) s *= 0.5 * (box[d][1] - box[d][0]);
    return s;
}

std::size_t Patch::locate(const Point3& xi) const {
    std::array<int, 3> pos{0, 0, 0};
    for (int d = 0; d < dim_; ++d) {
        const auto& kv = knots_[as_index(d)];
        const int s = find_span(kv, xi[as_index(d)]);
        const auto& spans = kv.spans();
        pos[as_index(d)] = static_cast<int>(std::lower_bound(spans.begin(), spans.end(), s) - spans.begin());
    }
    return element_index(pos);
}

Patch make_box_patch(int dim, const Point3& origin, const Point3& extents, const std::array<int, 3>& elements,
                     int degree) {
    if (dim < 1 || dim > 3) throw InvalidInput("box patch: dim must be 1, 2 or 3");
    std::vector<KnotVector> kvs;
    for (int d = 0; d < dim; ++d) {
        if (!(extents[as_index(d)] > 0.0)) throw InvalidInput("box patch: extents must be positive");
        kvs.push_back(KnotVector::uniform(degree, elements[as_index(d)]));
    }
    std::array<int, 3> n{1, 1, 1};
    for (int d = 0; d < dim; ++d) n[as_index(d)] = kvs[as_index(d)].num_basis();
    std::vector<Point3> cps;
    cps.reserve(as_index(n[0] * n[1] * n[2]));
    for (int k = 0; k < n[2]; ++k) {
        for (int j = 0; j < n[1]; ++j) {
            for (int i = 0; i < n[0]; ++i) {
                const std::array<int, 3> ijk{i, j, k};
                Point3 x{0.0, 0.0, 0.0};
                for (int d = 0; d < dim; ++d) {
                    const auto dd = as_index(d);
                    x[dd] = origin[dd] + extents[dd] * kvs[dd].greville(ijk[dd]);
                }
                cps.push_back(x);
            }
        }
    }
    const std::size_t total = cps.size();
    return {dim, std::move(kvs), std::move(cps), std::vector<double>(total, 1.0)};
}

namespace {

RationalBasis parametric_basis(const Patch& patch, std::size_t element, const Point3& xi,
                               const std::vector<std::size_t>& functions) {
    const auto spans = patch.element_spans(element);
    std::array<BasisEval, 3> per;
    for (int d = 0; d < patch.dim(); ++d) {
        per[as_index(d)] = eval_basis_on_span(patch.knot_vector(d), spans[as_index(d)], xi[as_index(d)], 2);
    }
    std::vector<double> w(functions.size());
    for (std::size_t a = 0; a < functions.size(); ++a) w[a] = patch.weights()[functions[a]];
    return rational_derivatives(std::span<const BasisEval>(per.data(), as_index(patch.dim())), w);
}

MapEval map_from_basis(const Patch& patch, const RationalBasis& rb, const std::vector<std::size_t>& functions) {
    const int dim = patch.dim();
    MapEval m;
    m.jacobian = identity_mat3<double>();
    for (int k = 0; k < dim; ++k)
        for (int a = 0; a < dim; ++a) m.jacobian[as_index(k)][as_index(a)] = 0.0;
    for (auto& h : m.hessian) h = zero_mat3<double>();
    for (std::size_t f = 0; f < functions.size(); ++f) {
        const Point3& P = patch.control_points()[functions[f]];
        for (std::size_t k = 0; k < as_index(dim); ++k) {
            m.x[k] += rb.values[f] * P[k];
            for (std::size_t a = 0; a < as_index(dim); ++a) {
                m.jacobian[k][a] += rb.grad[f][a] * P[k];
                for (std::size_t b = 0; b < as_index(dim); ++b) m.hessian[k][a][b] += rb.hess[f][a][b] * P[k];
            }
        }
    }
    m.det = det3(m.jacobian);
    return m;
}

}  // namespace

MapEval geometry_map(const Patch& patch, std::size_t element, const Point3& xi) {
    const auto functions = patch.element_functions(element);
    const auto rb = parametric_basis(patch, element, xi, functions);
    MapEval m = map_from_basis(patch, rb, functions);
    if (!(m.det > 0.0)) throw ElementInversion(element, "geometric map is not invertible");
    return m;
}

PhysicalBasis physical_basis(const Patch& patch, std::size_t element, const Point3& xi) {
    PhysicalBasis pb;
    pb.functions = patch.element_functions(element);
    const auto rb = parametric_basis(patch, element, xi, pb.functions);
    pb.map = map_from_basis(patch, rb, pb.functions);
    if (!(pb.map.det > 0.0)) throw ElementInversion(element, "geometric map is not invertible");
    const Matrix3 G = inverse3(pb.map.jacobian);  // G[alpha][J] = d xi_alpha / d X_J
    pb.inverse_jacobian = G;

    const std::size_t n = rb.size();
    pb.values = rb.values;
    pb.grad.resize(n);
    pb.hess.resize(n);
    for (std::size_t f = 0; f < n; ++f) {
        Point3 g{0.0, 0.0, 0.0};
        for (std::size_t J = 0; J < 3; ++J)
            for (std::size_t a = 0; a < 3; ++a) g[J] += rb.grad[f][a] * G[a][J];
        pb.grad[f] = g;

        // d2N/dxi2 minus the map-curvature correction, then pulled back on both sides.
        Matrix3 br = rb.hess[f];
        for (std::size_t k = 0; k < 3; ++k) {
            if (g[k] == 0.0) continue;
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b) br[a][b] -= g[k] * pb.map.hessian[k][a][b];
        }
        Matrix3 tmp{};
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t J = 0; J < 3; ++J)
                for (std::size_t b = 0; b < 3; ++b) tmp[a][J] += br[a][b] * G[b][J];
        Matrix3 h{};
        for (std::size_t I = 0; I < 3; ++I)
            for (std::size_t J = 0; J < 3; ++J)
                for (std::size_t a = 0; a < 3; ++a) h[I][J] += G[a][I] * tmp[a][J];
        pb.hess[f] = h;
    }
    return pb;
}

QuadratureRule make_quadrature(const Patch& patch, int extra) {
    return tensor_rule(patch.dim(), patch.degree() + 1 + extra);
}

std::vector<BoundaryEntity> enumerate_boundary(const Patch& patch) {
    std::vector<BoundaryEntity> out;
    const int dim = patch.dim();
    for (int d = 0; d < dim; ++d) {
        for (int s = 0; s < 2; ++s) {
            BoundaryEntity f;
            f.kind = BoundaryEntity::Kind::face;
            f.pinned[as_index(d)] = s;
            f.name = selector_name(f.pinned);
            out.push_back(f);
        }
    }
    if (dim == 3) {
        for (int d1 = 0; d1 < 3; ++d1) {
            for (int d2 = d1 + 1; d2 < 3; ++d2) {
                for (int s1 = 0; s1 < 2; ++s1) {
                    for (int s2 = 0; s2 < 2; ++s2) {
                        BoundaryEntity e;
                        e.kind = BoundaryEntity::Kind::edge;
                        e.pinned[as_index(d1)] = s1;
                        e.pinned[as_index(d2)] = s2;
                        e.name = selector_name(e.pinned);
                        e.adjacent_faces = {as_index(2 * d1 + s1), as_index(2 * d2 + s2)};
                        out.push_back(e);
                    }
                }
            }
        }
    }
    return out;
}

std::array<int, 3> parse_selector(const std::string& name, int dim) {
    std::array<int, 3> pinned{-1, -1, -1};
    if (name.empty() || name.size() % 2 != 0) throw InvalidInput("selector '" + name + "': expected e.g. x-, x+z+");
    for (std::size_t i = 0; i < name.size(); i += 2) {
        const char* hit = std::find(std::begin(kAxis), std::end(kAxis), name[i]);
        const int d = static_cast<int>(hit - std::begin(kAxis));
        if (d >= dim) throw InvalidInput("selector '" + name + "': axis '" + name[i] + "' not available");
        const char sign = name[i + 1];
        if (sign != '-' && sign != '+') throw InvalidInput("selector '" + name + "': sign must be - or +");
        if (pinned[as_index(d)] != -1) throw InvalidInput("selector '" + name + "': axis repeated");
        pinned[as_index(d)] = sign == '+' ? 1 : 0;
    }
    return pinned;
}

std::string selector_name(const std::array<int, 3>& pinned) {
    std::string s;
    for (std::size_t d = 0; d < 3; ++d) {
        if (pinned[d] < 0) continue;
        s += kAxis[d];
        s += pinned[d] == 1 ? '+' : '-';
    }
    return s;
}

FacePoint face_geometry(const Patch& patch, std::size_t element, int pinned_direction, int side, const MapEval& map) {
    const Matrix3 G = inverse3(map.jacobian);
    const auto d = as_index(pinned_direction);
    const Point3 n{G[d][0], G[d][1], G[d][2]};
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    const double sign = side == 1 ? 1.0 : -1.0;
    FacePoint fp;
    for (std::size_t J = 0; J < 3; ++J) fp.normal[J] = sign * n[J] / len;
    fp.area_factor = map.det * len;
    const auto box = patch.element_box(element);
    fp.element_size = (box[d][1] - box[d][0]) / len;
    return fp;
}

std::vector<BoundaryElement> boundary_quadrature(const Patch& patch, const BoundaryEntity& entity, int extra) {
    const int dim = patch.dim();
    std::vector<int> free_dirs, pinned_dirs;
    for (int d = 0; d < dim; ++d) (entity.pinned[as_index(d)] < 0 ? free_dirs : pinned_dirs).push_back(d);
    if (pinned_dirs.empty()) throw InvalidInput("boundary_quadrature: entity pins no direction");

    const GaussRule g = gauss_legendre(patch.degree() + 1 + extra);
    const std::size_t ng = g.points.size();
    std::size_t npts = 1;
    for (std::size_t i = 0; i < free_dirs.size(); ++i) npts *= ng;

    std::vector<BoundaryElement> out;
    for (std::size_t e = 0; e < patch.num_elements(); ++e) {
        const auto pos = patch.element_position(e);
        bool on = true;
        for (int d : pinned_dirs) {
            const int want = entity.pinned[as_index(d)] == 1 ? patch.num_elements(d) - 1 : 0;
            if (pos[as_index(d)] != want) on = false;
        }
        if (!on) continue;
        const auto box = patch.element_box(e);
        BoundaryElement be;
        be.element = e;
        for (std::size_t q = 0; q < npts; ++q) {
            Point3 xi{0.0, 0.0, 0.0};
            double w = 1.0;
            std::size_t rem = q;
            for (int d : free_dirs) {
                const auto dd = as_index(d);
                const std::size_t gi = rem % ng;
                rem /= ng;
                xi[dd] = box[dd][0] + 0.5 * (g.points[gi] + 1.0) * (box[dd][1] - box[dd][0]);
                w *= g.weights[gi] * 0.5 * (box[dd][1] - box[dd][0]);
            }
            for (int d : pinned_dirs) {
                const auto dd = as_index(d);
                xi[dd] = entity.pinned[dd] == 1 ? box[dd][1] : box[dd][0];
            }
            const MapEval m = geometry_map(patch, e, xi);
            BoundaryQuadPoint bp;
            bp.element = e;
            bp.xi = xi;
            if (pinned_dirs.size() == 1) {
                const int d = pinned_dirs.front();
                const FacePoint fp = face_geometry(patch, e, d, entity.pinned[as_index(d)], m);
                bp.weight = w * fp.area_factor;
                bp.normal = fp.normal;
                bp.element_size = fp.element_size;
            } else if (free_dirs.size() == 1) {
                const auto f = as_index(free_dirs.front());
                double len = 0.0;
                for (std::size_t k = 0; k < 3; ++k) len += m.jacobian[k][f] * m.jacobian[k][f];
                bp.weight = w * std::sqrt(len);
            } else {
                bp.weight = w;  // corner point
            }
            be.points.push_back(bp);
        }
        out.push_back(std::move(be));
    }
    return out;
}

std::vector<std::size_t> boundary_functions(const Patch& patch, const std::array<int, 3>& pinned) {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < patch.num_functions(); ++a) {
        const auto ijk = patch.function_ijk(a);
        bool on = true;
        for (int d = 0; d < patch.dim(); ++d) {
            const int want = pinned[as_index(d)];
            if (want < 0) continue;
            if (ijk[as_index(d)] != (want == 1 ? patch.num_basis(d) - 1 : 0)) on = false;
        }
        if (on) out.push_back(a);
    }
    return out;
}

}  // namespace gradiga
