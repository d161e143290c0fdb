#pragma once

// Forward-mode algorithmic differentiation with a fixed number of seeds.
//
// A Dual<N> carries a value and the N partial derivatives with respect to the
// lifted independent variables. Physics kernels are templates over the scalar
// type, so the same code produces residuals (double) and exact Jacobians
// (Dual<N>).

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gradiga/errors.hpp"

namespace gradiga {

template <int N>
class Dual {
public:
    static constexpr int num_seeds = N;

    constexpr Dual() noexcept : value_(0.0), seeds_{} {}
    constexpr Dual(double v) noexcept : value_(v), seeds_{} {}  // NOLINT: implicit constants

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] double seed(int i) const noexcept { return seeds_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::array<double, static_cast<std::size_t>(N)>& seeds() const noexcept { return seeds_; }
    std::array<double, static_cast<std::size_t>(N)>& seeds() noexcept { return seeds_; }

    /// Independent variable number `i` of N.
    static Dual variable(double v, int i) {
        Dual d(v);
        d.seeds_[static_cast<std::size_t>(i)] = 1.0;
        return d;
    }

    Dual& operator+=(const Dual& o) noexcept {
        value_ += o.value_;
        for (int i = 0; i < N; ++i) seeds_[i] += o.seeds_[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) noexcept {
        value_ -= o.value_;
        for (int i = 0; i < N; ++i) seeds_[i] -= o.seeds_[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) noexcept {
        for (int i = 0; i < N; ++i) seeds_[i] = seeds_[i] * o.value_ + value_ * o.seeds_[i];
        value_ *= o.value_;
        return *this;
    }
    Dual& operator/=(const Dual& o) noexcept {
        const double inv = 1.0 / o.value_;
        value_ /= o.value_;
        for (int i = 0; i < N; ++i) seeds_[i] = (seeds_[i] - value_ * o.seeds_[i]) * inv;
        return *this;
    }
    Dual& operator+=(double c) noexcept {
        value_ += c;
        return *this;
    }
    Dual& operator-=(double c) noexcept {
        value_ -= c;
        return *this;
    }
    Dual& operator*=(double c) noexcept {
        value_ *= c;
        for (int i = 0; i < N; ++i) seeds_[i] *= c;
        return *this;
    }
    Dual& operator/=(double c) noexcept {
        value_ /= c;
        for (int i = 0; i < N; ++i) seeds_[i] /= c;
        return *this;
    }

    friend Dual operator-(Dual a) noexcept {
        a.value_ = -a.value_;
        for (int i = 0; i < N; ++i) a.seeds_[i] = -a.seeds_[i];
        return a;
    }
    friend Dual operator+(Dual a, const Dual& b) noexcept { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) noexcept { return a -= b; }
    friend Dual operator*(Dual a, const Dual& b) noexcept { return a *= b; }
    friend Dual operator/(Dual a, const Dual& b) noexcept { return a /= b; }
    friend Dual operator+(Dual a, double c) noexcept { return a += c; }
    friend Dual operator+(double c, Dual a) noexcept { return a += c; }
    friend Dual operator-(Dual a, double c) noexcept { return a -= c; }
    friend Dual operator-(double c, const Dual& a) noexcept { return -a + c; }
    friend Dual operator*(Dual a, double c) noexcept { return a *= c; }
    friend Dual operator*(double c, Dual a) noexcept { return a *= c; }
    friend Dual operator/(Dual a, double c) noexcept { return a /= c; }
    friend Dual operator/(double c, const Dual& a) noexcept { return Dual(c) /= a; }

    friend bool operator<(const Dual& a, const Dual& b) noexcept { return a.value_ < b.value_; }
    friend bool operator>(const Dual& a, const Dual& b) noexcept { return a.value_ > b.value_; }
    friend bool operator<=(const Dual& a, const Dual& b) noexcept { return a.value_ <= b.value_; }
    friend bool operator>=(const Dual& a, const Dual& b) noexcept { return a.value_ >= b.value_; }

private:
    // f(a) with f'(a) = slope
    friend Dual chain(const Dual& a, double f, double slope) noexcept {
        Dual r(f);
        for (int i = 0; i < N; ++i) r.seeds_[i] = slope * a.seeds_[i];
        return r;
    }

    double value_;
    std::array<double, static_cast<std::size_t>(N)> seeds_;
};

template <int N>
Dual<N> exp(const Dual<N>& a) {
    const double e = std::exp(a.value());
    return chain(a, e, e);
}
template <int N>
Dual<N> log(const Dual<N>& a) {
    return chain(a, std::log(a.value()), 1.0 / a.value());
}
template <int N>
Dual<N> sqrt(const Dual<N>& a) {
    const double s = std::sqrt(a.value());
    return chain(a, s, 0.5 / s);
}
template <int N>
Dual<N> pow(const Dual<N>& a, double p) {
    const double v = std::pow(a.value(), p);
    return chain(a, v, p * std::pow(a.value(), p - 1.0));
}

// Scalar helpers so generic kernels can call value_of / exp / ... on doubles too.
inline double value_of(double x) noexcept { return x; }
template <int N>
double value_of(const Dual<N>& x) noexcept {
    return x.value();
}

template <class T>
struct is_dual : std::false_type {};
template <int N>
struct is_dual<Dual<N>> : std::true_type {};

/// Seeds dof i with the unit vector e_i. Throws if dofs.size() != N.
template <int N>
std::vector<Dual<N>> lift(std::span<const double> dofs) {
    if (dofs.size() != static_cast<std::size_t>(N)) {
        throw InvalidInput("lift: " + std::to_string(dofs.size()) + " dofs for " + std::to_string(N) + " seeds");
    }
    std::vector<Dual<N>> out;
    out.reserve(dofs.size());
    for (int i = 0; i < N; ++i) out.push_back(Dual<N>::variable(dofs[static_cast<std::size_t>(i)], i));
    return out;
}

/// Row r, column c = seed c of residual entry r.
template <int N>
Eigen::MatrixXd extract_jacobian(std::span<const Dual<N>> residual, std::size_t num_dofs) {
    if (num_dofs != static_cast<std::size_t>(N)) {
        throw InvalidInput("extract_jacobian: seed length " + std::to_string(N) + " does not match " +
                           std::to_string(num_dofs) + " dofs");
    }
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(residual.size()), N);
    for (std::size_t r = 0; r < residual.size(); ++r) {
        for (int c = 0; c < N; ++c) jac(static_cast<Eigen::Index>(r), c) = residual[r].seed(c);
    }
    return jac;
}

template <int N>
Eigen::VectorXd extract_values(std::span<const Dual<N>> residual) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(residual.size()));
    for (std::size_t r = 0; r < residual.size(); ++r) v(static_cast<Eigen::Index>(r)) = residual[r].value();
    return v;
}

}  // namespace gradiga
