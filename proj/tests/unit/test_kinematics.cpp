#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gradiga/errors.hpp"
#include "gradiga/kinematics.hpp"
#include "oracles.hpp"

using namespace gradiga;

namespace {

// Rotated state: gradU' = Q(I + gradU) - I, gradGradU' = Q . gradGradU.
std::pair<Mat3<double>, Tens3<double>> rotate_state(const Mat3<double>& Q, const Mat3<double>& g,
                                                    const Tens3<double>& h) {
    Mat3<double> F = g;
    for (int i = 0; i < 3; ++i) F[i][i] += 1.0;
    Mat3<double> gq = matmul3(Q, F);
    for (int i = 0; i < 3; ++i) gq[i][i] -= 1.0;
    Tens3<double> hq = zero_tens3<double>();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int J = 0; J < 3; ++J)
                for (int K = 0; K < 3; ++K) hq[i][J][K] += Q[i][k] * h[k][J][K];
    return {gq, hq};
}

}  // namespace

TEST(Kinematics, ReferenceState) {
    const auto k = compute_kinematics(zero_mat3<double>(), zero_tens3<double>());
    EXPECT_EQ(k.J, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            EXPECT_EQ(k.F[i][j], i == j ? 1.0 : 0.0);
            EXPECT_EQ(k.E[i][j], 0.0);
            for (int c = 0; c < 3; ++c) EXPECT_EQ(k.gradE[i][j][c], 0.0);
        }
}

TEST(Kinematics, UniaxialStretch) {
    Mat3<double> g = zero_mat3<double>();
    g[0][0] = 0.1;
    const auto k = compute_kinematics(g, zero_tens3<double>());
    EXPECT_NEAR(k.E[0][0], 0.105, 1e-15);
    EXPECT_NEAR(k.J, 1.1, 1e-15);
    EXPECT_EQ(k.E[1][1], 0.0);
}

TEST(Kinematics, SimpleShear) {
    Mat3<double> g = zero_mat3<double>();
    g[0][1] = 0.2;
    const auto k = compute_kinematics(g, zero_tens3<double>());
    EXPECT_NEAR(k.E[0][1], 0.1, 1e-15);
    EXPECT_NEAR(k.E[1][0], 0.1, 1e-15);
    EXPECT_NEAR(k.E[1][1], 0.02, 1e-15);
    EXPECT_NEAR(k.E[0][0], 0.0, 1e-15);
    EXPECT_NEAR(k.J, 1.0, 1e-15);
}

TEST(Kinematics, InversionThrowsWithElement) {
    Mat3<double> g = zero_mat3<double>();
    g[2][2] = -1.5;
    try {
        (void)compute_kinematics(g, zero_tens3<double>(), StrainMeasure::finite, 42);
        FAIL() << "expected ElementInversion";
    } catch (const ElementInversion& e) {
        EXPECT_EQ(e.element(), 42U);
    }
    // small-strain mode never inverts
    EXPECT_NO_THROW((void)compute_kinematics(g, zero_tens3<double>(), StrainMeasure::small));
}

TEST(Kinematics, SecondGradientIsSymmetrized) {
    Tens3<double> h = zero_tens3<double>();
    h[0][0][1] = 0.4;  // h[0][1][0] left at zero
    const auto k = compute_kinematics(zero_mat3<double>(), h);
    EXPECT_DOUBLE_EQ(k.gradF[0][0][1], 0.2);
    EXPECT_DOUBLE_EQ(k.gradF[0][1][0], 0.2);
}

TEST(Kinematics, FrameIndifference) {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 200; ++t) {
        const Mat3<double> Q = oracle::random_rotation(rng);
        const Mat3<double> g = oracle::random_mat3(rng, 0.3);
        const Tens3<double> h = oracle::random_sym_tens3(rng, 1.0);
        const auto [gq, hq] = rotate_state(Q, g, h);
        const auto k0 = compute_kinematics(g, h);
        const auto k1 = compute_kinematics(gq, hq);
        EXPECT_LE(oracle::max_abs_diff(k0.E, k1.E), 1e-12);
        EXPECT_LE(oracle::max_abs_diff(k0.gradE, k1.gradE), 1e-12);
        EXPECT_NEAR(k0.J, k1.J, 1e-12);
    }
}

TEST(Kinematics, StrainGradientMatchesFiniteDifferences) {
    // u_i = c_i sin(k . X): gradients known in closed form
    const std::array<double, 3> c{0.2, -0.15, 0.1};
    const std::array<double, 3> kv{1.3, -0.7, 2.1};
    const auto state = [&](const std::array<double, 3>& X) {
        double arg = 0.0;
        for (int i = 0; i < 3; ++i) arg += kv[i] * X[i];
        Mat3<double> g;
        Tens3<double> h;
        for (int i = 0; i < 3; ++i)
            for (int J = 0; J < 3; ++J) {
                g[i][J] = c[i] * kv[J] * std::cos(arg);
                for (int K = 0; K < 3; ++K) h[i][J][K] = -c[i] * kv[J] * kv[K] * std::sin(arg);
            }
        return std::make_pair(g, h);
    };
    for (auto measure : {StrainMeasure::finite, StrainMeasure::small}) {
        const std::array<double, 3> X{0.3, 0.8, -0.2};
        const auto [g, h] = state(X);
        const auto k = compute_kinematics(g, h, measure);
        const double step = 1e-5;
        double scale = 0.0;
        for (const auto& a : k.gradE)
            for (const auto& b : a)
                for (double v : b) scale = std::max(scale, std::abs(v));
        for (int C = 0; C < 3; ++C) {
            auto Xp = X;
            auto Xm = X;
            Xp[C] += step;
            Xm[C] -= step;
            const auto [gp, hp] = state(Xp);
            const auto [gm, hm] = state(Xm);
            const auto kp = compute_kinematics(gp, hp, measure);
            const auto km = compute_kinematics(gm, hm, measure);
            for (int A = 0; A < 3; ++A)
                for (int B = 0; B < 3; ++B) {
                    const double fd = (kp.E[A][B] - km.E[A][B]) / (2 * step);
                    EXPECT_NEAR(fd, k.gradE[A][B][C], 1e-6 * scale);
                }
        }
    }
}

TEST(Kinematics, SmallStrainMode) {
    std::mt19937_64 rng(5);
    const Mat3<double> g = oracle::random_mat3(rng, 0.3);
    const Tens3<double> h = oracle::random_sym_tens3(rng, 1.0);
    const auto k = compute_kinematics(g, h, StrainMeasure::small);
    EXPECT_EQ(k.J, 1.0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            EXPECT_EQ(k.F[a][b], a == b ? 1.0 : 0.0);
            EXPECT_DOUBLE_EQ(k.E[a][b], 0.5 * (g[a][b] + g[b][a]));
            for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(k.gradE[a][b][c], 0.5 * (h[a][b][c] + h[b][a][c]));
        }
}
