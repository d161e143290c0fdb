#pragma once

// F, Grad F, E, Grad E and J at a material point, generic over the scalar.

#include <cstddef>
#include <limits>

#include "gradiga/autodiff.hpp"
#include "gradiga/errors.hpp"
#include "gradiga/tensor.hpp"

namespace gradiga {

enum class StrainMeasure { finite, small };

template <class T>
struct Kinematics {
    Mat3<T> F;
    /// F[i][J][K] = F_iJ,K
    Tens3<T> gradF;
    Mat3<T> E;
    /// E_AB,C
    Tens3<T> gradE;
    T J;
};

/// gradU[i][J] = u_i,J and gradGradU[i][J][K] = u_i,JK. The trailing pair of
/// gradGradU is averaged on input. In small-strain mode E is the symmetric
/// displacement gradient and F is held at the identity.
template <class T>
Kinematics<T> compute_kinematics(const Mat3<T>& gradU, const Tens3<T>& gradGradU,
                                 StrainMeasure measure = StrainMeasure::finite,
                                 std::size_t element = std::numeric_limits<std::size_t>::max()) {
    Kinematics<T> k;
    const Tens3<T> H = symmetrize_trailing(gradGradU);
    if (measure == StrainMeasure::small) {
        k.F = identity_mat3<T>();
        k.gradF = zero_tens3<T>();
        k.J = T(1.0);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) k.E[a][b] = 0.5 * (gradU[a][b] + gradU[b][a]);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) k.gradE[a][b][c] = 0.5 * (H[a][b][c] + H[b][a][c]);
        return k;
    }

    k.F = gradU;
    for (int i = 0; i < 3; ++i) k.F[i][i] += 1.0;
    k.gradF = H;
    k.J = det3(k.F);
    if (!(value_of(k.J) > 0.0)) {
        throw ElementInversion(element, "deformation gradient has det F = " + std::to_string(value_of(k.J)));
    }
    // E = (F^T F - 1)/2
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            T s = k.F[0][a] * k.F[0][b];
            s += k.F[1][a] * k.F[1][b];
            s += k.F[2][a] * k.F[2][b];
            if (a == b) s -= 1.0;
            k.E[a][b] = 0.5 * s;
            k.E[b][a] = k.E[a][b];
        }
    }
    // E_AB,C = (F_kA,C F_kB + F_kA F_kB,C)/2
    for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                T s(0.0);
                for (int i = 0; i < 3; ++i) s += k.gradF[i][a][c] * k.F[i][b] + k.F[i][a] * k.gradF[i][b][c];
                k.gradE[a][b][c] = 0.5 * s;
                k.gradE[b][a][c] = k.gradE[a][b][c];
            }
        }
    }
    return k;
}

}  // namespace gradiga
