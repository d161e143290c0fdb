#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gradiga/analysis.hpp"
#include "gradiga/assembly.hpp"
#include "gradiga/autodiff.hpp"
#include "gradiga/errors.hpp"
#include "oracles.hpp"

using namespace gradiga;

TEST(Dual, LiftSeedsIdentity) {
    const std::vector<double> x{1.5, -2.0};
    const auto d = lift<2>(x);
    ASSERT_EQ(d.size(), 2U);
    EXPECT_EQ(d[0].value(), 1.5);
    EXPECT_EQ(d[0].seed(0), 1.0);
    EXPECT_EQ(d[0].seed(1), 0.0);
    EXPECT_EQ(d[1].seed(0), 0.0);
    EXPECT_EQ(d[1].seed(1), 1.0);
}

TEST(Dual, Square) {
    const auto x = lift<1>(std::vector<double>{3.0})[0];
    const auto y = x * x;
    EXPECT_EQ(y.value(), 9.0);
    EXPECT_EQ(y.seed(0), 6.0);
}

TEST(Dual, ProductPlusExponential) {
    const auto v = lift<2>(std::vector<double>{1.0, 2.0});
    const auto f = v[0] * v[1] + exp(v[0]);
    const double e = std::exp(1.0);
    EXPECT_NEAR(f.value(), 2.0 + e, 1e-15);
    EXPECT_NEAR(f.seed(0), 2.0 + e, 1e-15);
    EXPECT_NEAR(f.seed(1), 1.0, 1e-15);
}

TEST(Dual, ConstantsCarryNoSeeds) {
    const Dual<3> c(4.0);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(c.seed(i), 0.0);
    const auto x = Dual<3>::variable(2.0, 1);
    const auto y = 3.0 * x + c;
    EXPECT_EQ(y.seed(0), 0.0);
    EXPECT_EQ(y.seed(1), 3.0);
}

TEST(Dual, ElementaryFunctionsMatchFiniteDifferences) {
    const auto f = [](auto x) {
        using std::exp, std::log, std::sqrt, std::pow;
        return sqrt(x) * log(x + 2.0) / (1.0 + x * x) - pow(x, 2.5) + exp(-x) - 1.0 / x;
    };
    for (double x0 : {0.3, 1.1, 2.7}) {
        const auto d = f(Dual<1>::variable(x0, 0));
        const double h = 1e-6;
        EXPECT_NEAR(d.value(), f(x0), 1e-15);
        EXPECT_NEAR(d.seed(0), (f(x0 + h) - f(x0 - h)) / (2 * h), 1e-8);
    }
}

TEST(Dual, DeterminantAndInverseOfSmallMatrices) {
    std::mt19937_64 rng(2);
    const Mat3<double> a = oracle::random_mat3(rng, 1.0);
    Mat3<Dual<9>> ad;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ad[i][j] = Dual<9>::variable(a[i][j] + (i == j ? 2.0 : 0.0), 3 * i + j);
    const auto det = det3(ad);
    const auto inv = inverse3(ad);
    // d det / dA = det A^{-T}
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(det.seed(3 * i + j), det.value() * inv[j][i].value(), 1e-13);
}

TEST(ExtractJacobian, LinearResidualIsExact) {
    Eigen::Matrix3d K;
    K << 4, -1, 0.5, -1, 3, 2, 0.25, 2, 5;
    const Eigen::Vector3d f(1, 2, 3);
    const std::vector<double> u0{0.3, -0.7, 1.9};
    const auto u = lift<3>(u0);
    std::vector<Dual<3>> r(3);
    for (int i = 0; i < 3; ++i) {
        r[i] = Dual<3>(-f(i));
        for (int j = 0; j < 3; ++j) r[i] += K(i, j) * u[j];
    }
    const Eigen::MatrixXd J = extract_jacobian<3>(r, 3);
    EXPECT_EQ((J - Eigen::MatrixXd(K)).cwiseAbs().maxCoeff(), 0.0);
    const Eigen::VectorXd v = extract_values<3>(r);
    EXPECT_NEAR(v(0), 4 * 0.3 + 0.7 + 0.5 * 1.9 - 1, 1e-15);
}

TEST(ExtractJacobian, EmptyElement) {
    const auto u = lift<0>(std::vector<double>{});
    EXPECT_TRUE(u.empty());
    const std::vector<Dual<0>> r;
    const Eigen::MatrixXd J = extract_jacobian<0>(r, 0);
    EXPECT_EQ(J.rows(), 0);
    EXPECT_EQ(J.cols(), 0);
}

TEST(ExtractJacobian, SeedLengthMismatch) {
    const std::vector<Dual<3>> r(3);
    EXPECT_THROW((void)extract_jacobian<3>(r, 4), InvalidInput);
    EXPECT_THROW((void)lift<3>(std::vector<double>{1.0, 2.0}), InvalidInput);
}

namespace {

Eigen::VectorXd element_real(const NonlinearSystem& sys, std::size_t e, const Eigen::VectorXd& u) {
    Eigen::VectorXd r;
    sys.element_system(e, u, 1.0, TangentMode::pointwise, r, nullptr);
    return r;
}

}  // namespace

TEST(ElementJacobian, FiniteStrainBarMatchesFiniteDifferences) {
    for (int degree : {2, 3, 4}) {
        Bar1d bar;
        bar.l = 0.1;
        bar.elements = 3;
        bar.degree = degree;
        bar.measure = StrainMeasure::finite;
        const NonlinearSystem sys(make_bar_1d(bar));
        std::mt19937_64 rng(40 + static_cast<std::uint64_t>(degree));
        std::uniform_real_distribution<double> u(-0.05, 0.05);
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd U(static_cast<Eigen::Index>(sys.num_dofs()));
            for (Eigen::Index i = 0; i < U.size(); ++i) U(i) = 0.3 * sys.patch().control_points()[static_cast<std::size_t>(i)][0] + u(rng);
            for (std::size_t e = 0; e < sys.patch().num_elements(); ++e) {
                const Eigen::VectorXd ue = sys.gather(U, e);
                const Eigen::MatrixXd fd =
                    oracle::fd_jacobian([&](const Eigen::VectorXd& x) { return element_real(sys, e, x); }, ue, 1e-6);
                for (auto mode : {TangentMode::element, TangentMode::pointwise}) {
                    Eigen::VectorXd r;
                    Eigen::MatrixXd K;
                    sys.element_system(e, ue, 1.0, mode, r, &K);
                    EXPECT_LE(oracle::relative_error(K, fd), 1e-6) << "degree " << degree;
                }
            }
        }
    }
}

TEST(ElementJacobian, ValueComponentIsBitwiseReal) {
    Bar1d bar;
    bar.l = 0.2;
    bar.elements = 4;
    bar.measure = StrainMeasure::finite;
    const NonlinearSystem sys(make_bar_1d(bar));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    Eigen::VectorXd U(static_cast<Eigen::Index>(sys.num_dofs()));
    for (Eigen::Index i = 0; i < U.size(); ++i) U(i) = u(rng);
    for (std::size_t e = 0; e < sys.patch().num_elements(); ++e) {
        const Eigen::VectorXd ue = sys.gather(U, e);
        const Eigen::VectorXd real = element_real(sys, e, ue);
        for (auto mode : {TangentMode::element, TangentMode::pointwise}) {
            Eigen::VectorXd r;
            Eigen::MatrixXd K;
            sys.element_system(e, ue, 1.0, mode, r, &K);
            ASSERT_EQ(r.size(), real.size());
            for (Eigen::Index i = 0; i < r.size(); ++i) EXPECT_EQ(r(i), real(i));
        }
    }
}
