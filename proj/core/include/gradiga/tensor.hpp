#pragma once

// Fixed-size 3x3 and 3x3x3 arrays over a generic scalar. Kept deliberately
// plain so the same kernels run on double and on Dual<N>.

#include <array>
#include <cstddef>

namespace gradiga {

template <class T>
using Vec3 = std::array<T, 3>;

template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

/// a[i][J][K]
template <class T>
using Tens3 = std::array<Mat3<T>, 3>;

template <class T>
Mat3<T> zero_mat3() {
    Mat3<T> m;
    for (auto& row : m) row.fill(T(0.0));
    return m;
}

template <class T>
Mat3<T> identity_mat3() {
    Mat3<T> m = zero_mat3<T>();
    for (int i = 0; i < 3; ++i) m[i][i] = T(1.0);
    return m;
}

template <class T>
Tens3<T> zero_tens3() {
    Tens3<T> t;
    for (auto& m : t) m = zero_mat3<T>();
    return t;
}

template <class T>
T det3(const Mat3<T>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// Inverse by cofactors; caller guarantees det != 0.
template <class T>
Mat3<T> inverse3(const Mat3<T>& a) {
    const T inv_det = T(1.0) / det3(a);
    Mat3<T> r;
    r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * inv_det;
    r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv_det;
    r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv_det;
    r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * inv_det;
    r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv_det;
    r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv_det;
    r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * inv_det;
    r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv_det;
    r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv_det;
    return r;
}

template <class T>
Mat3<T> transpose3(const Mat3<T>& a) {
    Mat3<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
    return r;
}

template <class T>
Mat3<T> matmul3(const Mat3<T>& a, const Mat3<T>& b) {
    Mat3<T> r = zero_mat3<T>();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) r[i][j] += a[i][k] * b[k][j];
    return r;
}

template <class T>
T trace3(const Mat3<T>& a) {
    return a[0][0] + a[1][1] + a[2][2];
}

/// Average of t[i][J][K] and t[i][K][J].
template <class T>
Tens3<T> symmetrize_trailing(const Tens3<T>& t) {
    Tens3<T> s;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) s[i][j][k] = 0.5 * (t[i][j][k] + t[i][k][j]);
    return s;
}

/// Unique (J<=K) index pairs of a trailing-symmetric third-order tensor.
inline constexpr std::array<std::array<int, 2>, 6> kSymPairs{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

}  // namespace gradiga
