#pragma once

// Quadrature-point kernels shared by the real, element-AD and pointwise-AD
// assembly paths. Every path goes through these templates so residual values
// agree bit for bit.

#include <array>
#include <cstddef>
#include <span>

#include "gradiga/assembly.hpp"
#include "gradiga/kinematics.hpp"
#include "gradiga/material.hpp"
#include "gradiga/mesh.hpp"
#include "gradiga/tensor.hpp"

namespace gradiga::kernels {

/// Unique index pairs (J <= K) with both indices below dim.
inline std::span<const std::array<int, 2>> sym_pairs(int dim) {
    static constexpr std::array<std::array<int, 2>, 1> p1{{{0, 0}}};
    static constexpr std::array<std::array<int, 2>, 3> p2{{{0, 0}, {1, 1}, {0, 1}}};
    if (dim == 1) return p1;
    if (dim == 2) return p2;
    return kSymPairs;
}

/// Kinematic variables per displacement component: dim gradients plus the
/// unique second derivatives.
inline int vars_per_component(int dim) { return dim + dim * (dim + 1) / 2; }

/// u_i,J and u_i,JK from local dofs (order a * ncomp + i).
template <class T>
void displacement_gradients(const PhysicalBasis& pb, int ncomp, std::span<const T> u, Mat3<T>& g, Tens3<T>& h) {
    g = zero_mat3<T>();
    h = zero_tens3<T>();
    const int dim = ncomp;
    const auto pairs = sym_pairs(dim);
    for (std::size_t a = 0; a < pb.size(); ++a) {
        for (int i = 0; i < ncomp; ++i) {
            const T& ua = u[a * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(i)];
            for (int J = 0; J < dim; ++J) g[i][J] += ua * pb.grad[a][J];
            for (const auto& p : pairs) h[i][p[0]][p[1]] += ua * pb.hess[a][p[0]][p[1]];
        }
    }
    for (int i = 0; i < ncomp; ++i)
        for (const auto& p : pairs) h[i][p[1]][p[0]] = h[i][p[0]][p[1]];
}

/// out[a*ncomp+i] += w (P_iJ N_a,J + B_iJK N_a,JK)
template <class T>
void add_volume_residual(const PhysicalBasis& pb, int ncomp, const StressState<T>& s, double w, std::span<T> out) {
    const int dim = ncomp;
    for (std::size_t a = 0; a < pb.size(); ++a) {
        for (int i = 0; i < ncomp; ++i) {
            T acc(0.0);
            for (int J = 0; J < dim; ++J) acc += s.P[i][J] * pb.grad[a][J];
            for (int J = 0; J < dim; ++J)
                for (int K = 0; K < dim; ++K) acc += s.B[i][J][K] * pb.hess[a][J][K];
            out[a * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(i)] += w * acc;
        }
    }
}

/// Normal-derivative flux per component: -B_iJK N_J N_K + (C/h)(Du_i - target_i).
template <class T>
std::array<T, 3> nitsche_flux(const StressState<T>& s, const Mat3<T>& g, const NitschePoint& np, double load_factor,
                              int ncomp) {
    std::array<T, 3> f{T(0.0), T(0.0), T(0.0)};
    const int dim = ncomp;
    const auto& N = np.normal;
    for (int i = 0; i < ncomp; ++i) {
        if (!np.active[static_cast<std::size_t>(i)]) continue;
        T bnn(0.0);
        for (int J = 0; J < dim; ++J)
            for (int K = 0; K < dim; ++K) bnn += s.B[i][J][K] * (N[J] * N[K]);
        T du(0.0);
        for (int J = 0; J < dim; ++J) du += g[i][J] * N[J];
        f[i] = (np.penalty / np.element_size) * (du - load_factor * np.target[static_cast<std::size_t>(i)]) - bnn;
    }
    return f;
}

/// out[a*ncomp+i] += w DN_a f_i
template <class T>
void add_face_residual(const PhysicalBasis& pb, int ncomp, const std::array<T, 3>& f, const Point3& normal, double w,
                       std::span<T> out) {
    for (std::size_t a = 0; a < pb.size(); ++a) {
        double dn = 0.0;
        for (int J = 0; J < ncomp; ++J) dn += pb.grad[a][J] * normal[J];
        for (int i = 0; i < ncomp; ++i) {
            out[a * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(i)] += (w * dn) * f[i];
        }
    }
}

/// Volume and weak-face residual of one element over a generic scalar.
template <class T>
void element_kernel(const NonlinearSystem& sys, const QuadratureRule& rule, std::size_t e, std::span<const T> u,
                    double load_factor, std::span<T> out) {
    const Patch& patch = sys.patch();
    const int ncomp = sys.num_components();
    const auto& mat = sys.problem().material;
    const auto measure = sys.problem().measure;
    const double scale = patch.parametric_scale(e);
    Mat3<T> g;
    Tens3<T> h;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const PhysicalBasis pb = physical_basis(patch, e, patch.parametric_point(e, rule.points[q]));
        displacement_gradients<T>(pb, ncomp, u, g, h);
        const auto s = stresses(compute_kinematics(g, h, measure, e), mat);
        add_volume_residual<T>(pb, ncomp, s, rule.weights[q] * scale * pb.map.det, out);
    }
    for (const NitschePoint& np : sys.nitsche_points(e)) {
        const PhysicalBasis pb = physical_basis(patch, e, np.xi);
        displacement_gradients<T>(pb, ncomp, u, g, h);
        const auto s = stresses(compute_kinematics(g, h, measure, e), mat);
        add_face_residual<T>(pb, ncomp, nitsche_flux(s, g, np, load_factor, ncomp), np.normal, np.weight, out);
    }
}

}  // namespace gradiga::kernels
