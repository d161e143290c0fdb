#include "gradiga/material.hpp"

#include <string>

#include "gradiga/errors.hpp"

namespace gradiga {

void validate(const MaterialParams& m) {
    if (!(m.mu > 0.0)) throw InvalidInput("material: mu must be positive");
    if (!(m.lambda >= 0.0)) throw InvalidInput("material: lambda must be non-negative");
    if (!(m.l >= 0.0)) throw InvalidInput("material: l must be non-negative");
}

StressState<double> stresses_by_differentiation(const Mat3<double>& gradU, const Tens3<double>& gradGradU,
                                                const MaterialParams& m, StrainMeasure measure) {
    using D = Dual<27>;
    Mat3<D> g;
    Tens3<D> h;
    for (int i = 0; i < 3; ++i)
        for (int J = 0; J < 3; ++J) g[i][J] = D::variable(gradU[i][J], 3 * i + J);
    for (int i = 0; i < 3; ++i) {
        for (int p = 0; p < 6; ++p) {
            const int J = kSymPairs[p][0], K = kSymPairs[p][1];
            const D v = D::variable(0.5 * (gradGradU[i][J][K] + gradGradU[i][K][J]), 9 + 6 * i + p);
            h[i][J][K] = v;
            h[i][K][J] = v;
        }
    }
    const D W = energy_density(compute_kinematics(g, h, measure), m);

    StressState<double> s;
    for (int i = 0; i < 3; ++i)
        for (int J = 0; J < 3; ++J) s.P[i][J] = W.seed(3 * i + J);
    for (int i = 0; i < 3; ++i) {
        for (int p = 0; p < 6; ++p) {
            const int J = kSymPairs[p][0], K = kSymPairs[p][1];
            const double d = W.seed(9 + 6 * i + p) / (J == K ? 1.0 : 2.0);
            s.B[i][J][K] = d;
            s.B[i][K][J] = d;
        }
    }
    return s;
}

CurrentStress cauchy_pushforward(const Kinematics<double>& k, const StressState<double>& s) {
    if (!(k.J > 0.0)) throw ElementInversion(0, "pushforward needs J > 0, got " + std::to_string(k.J));
    CurrentStress c;
    c.J = k.J;
    const double inv = 1.0 / k.J;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int J = 0; J < 3; ++J) {
                acc += s.P[i][J] * k.F[j][J];
                for (int K = 0; K < 3; ++K) acc += s.B[i][J][K] * k.gradF[j][J][K];
            }
            c.sigma[i][j] = inv * acc;
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int kk = 0; kk < 3; ++kk) {
                double acc = 0.0;
                for (int J = 0; J < 3; ++J)
                    for (int K = 0; K < 3; ++K) acc += s.B[i][J][K] * k.F[j][J] * k.F[kk][K];
                c.beta[i][j][kk] = inv * acc;
            }
    return c;
}

MultiwellValue multiwell_energy_1d(double E11, const MaterialParams& /*m*/) {
    const auto w = multiwell_potential(E11);
    return {w[0], w[1]};
}

}  // namespace gradiga
