#pragma once

// Gradient-elastic energy densities, reference stresses P and B, and the
// current-configuration pushforward.

#include <array>

#include "gradiga/autodiff.hpp"
#include "gradiga/kinematics.hpp"
#include "gradiga/tensor.hpp"

namespace gradiga {

enum class MaterialModel { toupin_quadratic, multiwell_1d };

struct MaterialParams {
    double lambda = 1.0;
    double mu = 1.0;
    /// gradient length scale, >= 0
    double l = 0.0;
    MaterialModel model = MaterialModel::toupin_quadratic;
};

/// Throws InvalidInput unless mu > 0, lambda >= 0, l >= 0.
void validate(const MaterialParams& m);

template <class T>
struct EnergyParts {
    T strain;
    T gradient;
};

template <class T>
struct StressState {
    Mat3<T> P;
    /// symmetric in the trailing pair
    Tens3<T> B;
};

struct CurrentStress {
    Mat3<double> sigma;
    Tens3<double> beta;
    double J = 1.0;
};

/// 1/4 E^4 - 1/3 E^3 - 3/4 E^2 and its derivative.
template <class T>
std::array<T, 2> multiwell_potential(const T& e) {
    const T e2 = e * e;
    return {0.25 * e2 * e2 - (1.0 / 3.0) * e2 * e - 0.75 * e2, e2 * e - e2 - 1.5 * e};
}

/// Non-gradient and gradient parts; their sum is energy_density.
template <class T>
EnergyParts<T> energy_parts(const Kinematics<T>& k, const MaterialParams& m) {
    EnergyParts<T> w{T(0.0), T(0.0)};
    if (m.model == MaterialModel::multiwell_1d) {
        w.strain = multiwell_potential(k.E[0][0])[0];
    } else {
        const T tr = trace3(k.E);
        T ee(0.0);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) ee += k.E[a][b] * k.E[a][b];
        w.strain = 0.5 * m.lambda * tr * tr + m.mu * ee;
    }
    if (m.l > 0.0) {
        T g(0.0);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) g += k.gradE[a][b][c] * k.gradE[a][b][c];
        w.gradient = 0.5 * m.mu * m.l * m.l * g;
    }
    return w;
}

template <class T>
T energy_density(const Kinematics<T>& k, const MaterialParams& m) {
    const auto w = energy_parts(k, m);
    return w.strain + w.gradient;
}

/// Closed forms: P_iJ = F_iA S_AJ + mu l^2 E_AJ,C F_iA,C and
/// B_iJK = sym_JK(mu l^2 F_iA E_AJ,K), with S = dW/dE of the non-gradient part.
template <class T>
StressState<T> stresses(const Kinematics<T>& k, const MaterialParams& m) {
    Mat3<T> S = zero_mat3<T>();
    if (m.model == MaterialModel::multiwell_1d) {
        S[0][0] = multiwell_potential(k.E[0][0])[1];
    } else {
        const T tr = trace3(k.E);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) S[a][b] = 2.0 * m.mu * k.E[a][b];
        for (int a = 0; a < 3; ++a) S[a][a] += m.lambda * tr;
    }
    StressState<T> s;
    s.P = matmul3(k.F, S);
    s.B = zero_tens3<T>();
    if (m.l <= 0.0) return s;

    const double c = m.mu * m.l * m.l;
    for (int i = 0; i < 3; ++i) {
        for (int J = 0; J < 3; ++J) {
            T acc(0.0);
            for (int A = 0; A < 3; ++A)
                for (int C = 0; C < 3; ++C) acc += k.gradE[A][J][C] * k.gradF[i][A][C];
            s.P[i][J] += c * acc;
        }
    }
    Tens3<T> raw;
    for (int i = 0; i < 3; ++i)
        for (int J = 0; J < 3; ++J)
            for (int K = 0; K < 3; ++K) {
                T acc(0.0);
                for (int A = 0; A < 3; ++A) acc += k.F[i][A] * k.gradE[A][J][K];
                raw[i][J][K] = c * acc;
            }
    s.B = symmetrize_trailing(raw);
    return s;
}

/// P and B as derivatives of energy_density with respect to gradU and the
/// (symmetric) gradGradU, by forward AD. Off-diagonal pairs split evenly.
StressState<double> stresses_by_differentiation(const Mat3<double>& gradU, const Tens3<double>& gradGradU,
                                                const MaterialParams& m,
                                                StrainMeasure measure = StrainMeasure::finite);

/// sigma_ij = (P_iJ F_jJ + B_iJK F_jJ,K)/J, beta_ijk = B_iJK F_jJ F_kK / J.
/// Throws ElementInversion when J <= 0.
CurrentStress cauchy_pushforward(const Kinematics<double>& k, const StressState<double>& s);

struct MultiwellValue {
    double W = 0.0;
    double dW = 0.0;
};

/// Non-gradient multiwell density and its derivative in E11.
MultiwellValue multiwell_energy_1d(double E11, const MaterialParams& m);

}  // namespace gradiga
