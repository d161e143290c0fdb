#include "gradiga/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gradiga/errors.hpp"

namespace gradiga {

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 1) throw InvalidInput("knot vector: degree must be >= 1");
    const auto p = static_cast<std::size_t>(degree_);
    if (knots_.size() < 2 * (p + 1)) throw InvalidInput("knot vector: too few knots for degree " + std::to_string(degree_));
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i] >= knots_[i - 1])) throw InvalidInput("knot vector: knots must be non-decreasing");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (multiplicity(i) > degree_ + 1) throw InvalidInput("knot vector: multiplicity exceeds degree+1");
    }
    if (multiplicity(0) != degree_ + 1 || multiplicity(knots_.size() - 1) != degree_ + 1) {
        throw InvalidInput("knot vector: end knots must be repeated exactly degree+1 times (open knot vector)");
    }
    if (!(knots_.front() < knots_.back())) throw InvalidInput("knot vector: empty parametric domain");
    for (int s = degree_; s < num_basis(); ++s) {
        if (knots_[static_cast<std::size_t>(s)] < knots_[static_cast<std::size_t>(s) + 1]) spans_.push_back(s);
    }
}

KnotVector KnotVector::uniform(int degree, int num_spans, double a, double b) {
    if (num_spans < 1) throw InvalidInput("knot vector: need at least one span");
    if (!(a < b)) throw InvalidInput("knot vector: empty parametric domain");
    std::vector<double> k;
    k.reserve(static_cast<std::size_t>(num_spans + 2 * degree + 1));
    for (int i = 0; i < degree; ++i) k.push_back(a);
    for (int i = 0; i <= num_spans; ++i) {
        k.push_back(i == num_spans ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(num_spans));
    }
    for (int i = 0; i < degree; ++i) k.push_back(b);
    return {degree, std::move(k)};
}

int KnotVector::multiplicity(std::size_t i) const {
    const double v = knots_[i];
    return static_cast<int>(std::count(knots_.begin(), knots_.end(), v));
}

double KnotVector::greville(int i) const {
    double s = 0.0;
    for (int j = 1; j <= degree_; ++j) s += knots_[static_cast<std::size_t>(i + j)];
    return s / degree_;
}

int find_span(const KnotVector& kv, double xi) {
    const double lo = kv.lower();
    const double hi = kv.upper();
    if (!(xi >= lo && xi <= hi)) {
        throw DomainError("parametric coordinate " + std::to_string(xi) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    }
    const auto& spans = kv.spans();
    if (xi >= hi) return spans.back();
    // Last span whose left knot is <= xi.
    const auto it = std::upper_bound(spans.begin(), spans.end(), xi,
                                     [&](double x, int s) { return x < kv.knot(static_cast<std::size_t>(s)); });
    return *std::prev(it);
}

BasisEval eval_basis(const KnotVector& kv, double xi, int nderiv) {
    return eval_basis_on_span(kv, find_span(kv, xi), xi, nderiv);
}

// Derivative recursion of Piegl & Tiller (the "DersBasisFuns" triangle).
BasisEval eval_basis_on_span(const KnotVector& kv, int span, double xi, int nderiv) {
    if (nderiv < 0 || nderiv > 2) throw InvalidInput("eval_basis: nderiv must be 0, 1 or 2");
    const int p = kv.degree();
    const auto& U = kv.knots();
    const auto s = static_cast<std::size_t>(span);
    if (span < p || span >= kv.num_basis() || !(U[s] < U[s + 1])) throw InvalidInput("eval_basis: invalid span");
    if (!(xi >= U[s] - 1e-14 * (U[s + 1] - U[s]) && xi <= U[s + 1] + 1e-14 * (U[s + 1] - U[s]))) {
        throw DomainError("eval_basis: xi outside span");
    }

    const auto np = static_cast<std::size_t>(p);
    std::vector<std::vector<double>> ndu(np + 1, std::vector<double>(np + 1, 0.0));
    std::vector<double> left(np + 1, 0.0), right(np + 1, 0.0);
    ndu[0][0] = 1.0;
    for (std::size_t j = 1; j <= np; ++j) {
        left[j] = xi - U[s + 1 - j];
        right[j] = U[s + j] - xi;
        double saved = 0.0;
        for (std::size_t r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];  // lower triangle: knot differences
            // 0/0 only arises for zero-length spans, excluded above; keep the convention anyway.
            const double temp = ndu[j][r] == 0.0 ? 0.0 : ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    BasisEval out;
    out.span = span;
    out.values.resize(np + 1);
    out.d1.assign(np + 1, 0.0);
    out.d2.assign(np + 1, 0.0);
    for (std::size_t j = 0; j <= np; ++j) out.values[j] = ndu[j][np];
    if (nderiv == 0) return out;

    const int n = std::min(nderiv, p);
    std::vector<std::vector<double>> ders(static_cast<std::size_t>(n) + 1, std::vector<double>(np + 1, 0.0));
    std::vector<std::vector<double>> a(2, std::vector<double>(np + 1, 0.0));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= n; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            auto A = [&](int row, int col) -> double& { return a[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]; };
            auto NDU = [&](int row, int col) { return ndu[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]; };
            if (r >= k) {
                A(s2, 0) = NDU(pk + 1, rk) == 0.0 ? 0.0 : A(s1, 0) / NDU(pk + 1, rk);
                d = A(s2, 0) * NDU(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                A(s2, j) = NDU(pk + 1, rk + j) == 0.0 ? 0.0 : (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j);
                d += A(s2, j) * NDU(rk + j, pk);
            }
            if (r <= pk) {
                A(s2, k) = NDU(pk + 1, r) == 0.0 ? 0.0 : -A(s1, k - 1) / NDU(pk + 1, r);
                d += A(s2, k) * NDU(r, pk);
            }
            ders[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = d;
            std::swap(s1, s2);
        }
    }
    for (std::size_t r = 0; r <= np; ++r) {
        out.d1[r] = ders[1][r] * p;
        if (n >= 2) out.d2[r] = ders[2][r] * p * (p - 1);
    }
    return out;
}

RationalBasis rational_derivatives(std::span<const BasisEval> per_direction, std::span<const double> weights) {
    const std::size_t dim = per_direction.size();
    if (dim < 1 || dim > 3) throw InvalidInput("rational_derivatives: 1 to 3 directions required");
    std::array<std::size_t, 3> n{1, 1, 1};
    std::size_t total = 1;
    for (std::size_t d = 0; d < dim; ++d) {
        n[d] = per_direction[d].values.size();
        total *= n[d];
    }
    if (weights.size() != total) throw InvalidInput("rational_derivatives: weight count does not match basis");
    for (double w : weights) {
        if (!(w > 0.0)) throw InvalidInput("rational_derivatives: weights must be strictly positive");
    }

    auto val = [&](std::size_t d, std::size_t i, int order) {
        if (d >= dim) return order == 0 ? 1.0 : 0.0;
        const auto& b = per_direction[d];
        return order == 0 ? b.values[i] : order == 1 ? b.d1[i] : b.d2[i];
    };

    RationalBasis out;
    out.dim = static_cast<int>(dim);
    out.values.resize(total);
    out.grad.resize(total);
    out.hess.resize(total);

    // Weighted polynomial products and their derivatives.
    std::vector<double> B(total);
    std::vector<std::array<double, 3>> dB(total);
    std::vector<std::array<std::array<double, 3>, 3>> d2B(total);
    double W = 0.0;
    std::array<double, 3> dW{};
    std::array<std::array<double, 3>, 3> d2W{};
    for (std::size_t k = 0; k < n[2]; ++k) {
        for (std::size_t j = 0; j < n[1]; ++j) {
            for (std::size_t i = 0; i < n[0]; ++i) {
                const std::size_t a = i + n[0] * (j + n[1] * k);
                const std::array<std::size_t, 3> idx{i, j, k};
                const double w = weights[a];
                auto prod = [&](std::array<int, 3> orders) {
                    double v = w;
                    for (std::size_t d = 0; d < 3; ++d) v *= val(d, idx[d], orders[d]);
                    return v;
                };
                B[a] = prod({0, 0, 0});
                for (int al = 0; al < 3; ++al) {
                    std::array<int, 3> o{0, 0, 0};
                    o[static_cast<std::size_t>(al)] = 1;
                    dB[a][static_cast<std::size_t>(al)] = prod(o);
                    for (int be = 0; be < 3; ++be) {
                        std::array<int, 3> o2{0, 0, 0};
                        o2[static_cast<std::size_t>(al)] += 1;
                        o2[static_cast<std::size_t>(be)] += 1;
                        d2B[a][static_cast<std::size_t>(al)][static_cast<std::size_t>(be)] = prod(o2);
                    }
                }
                W += B[a];
                for (std::size_t al = 0; al < 3; ++al) {
                    dW[al] += dB[a][al];
                    for (std::size_t be = 0; be < 3; ++be) d2W[al][be] += d2B[a][al][be];
                }
            }
        }
    }

    for (std::size_t a = 0; a < total; ++a) {
        const double N = B[a] / W;
        out.values[a] = N;
        for (std::size_t al = 0; al < 3; ++al) out.grad[a][al] = (dB[a][al] - N * dW[al]) / W;
        for (std::size_t al = 0; al < 3; ++al) {
            for (std::size_t be = 0; be < 3; ++be) {
                out.hess[a][al][be] = (d2B[a][al][be] - out.grad[a][al] * dW[be] - out.grad[a][be] * dW[al] -
                                       N * d2W[al][be]) /
                                      W;
            }
        }
    }
    return out;
}

}  // namespace gradiga
