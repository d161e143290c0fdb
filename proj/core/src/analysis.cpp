#include "gradiga/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gradiga/errors.hpp"
#include "gradiga/kernels.hpp"

namespace gradiga {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

// Per-direction polynomial basis values on a span.
std::vector<double> span_values(const KnotVector& kv, int span, double xi) {
    return eval_basis_on_span(kv, span, xi, 0).values;
}

}  // namespace

Exact1d analytic_1d(double x, double mu, double l, double t, double L) {
    if (!(l > 0.0) || !(mu > 0.0)) throw InvalidInput("analytic_1d: need l > 0 and mu > 0");
    if (!(x >= 0.0 && x <= L)) throw DomainError("analytic_1d: x outside [0, L]");
    // Numerator and denominator divided by e^{L/l}.
    const double ea = std::exp(-L / l);
    const double e0 = std::exp(-x / l);
    const double e1 = std::exp((x - L) / l);
    const double den = 1.0 + ea;
    Exact1d r;
    r.u = t * l / mu * (ea - 1.0 + e0 - e1) / den + t / mu * x;
    r.du = t / mu * (-e0 - e1) / den + t / mu;
    r.d2u = t / (mu * l) * (e0 - e1) / den;
    return r;
}

Problem make_bar_1d(const Bar1d& bar) {
    if (bar.elements < 1) throw InvalidInput("bar: need at least one element");
    if (!(bar.L > 0.0)) throw InvalidInput("bar: length must be positive");
    MaterialParams m;
    m.lambda = 0.0;
    m.mu = 0.5 * bar.mu;
    m.l = std::sqrt(2.0) * bar.l;
    std::vector<BoundaryCondition> bcs;
    bcs.push_back({"x-", BcKind::dirichlet_u, {0}, 0.0, std::nullopt, 5.0});
    if (bar.l > 0.0) {
        bcs.push_back({"x-", BcKind::dirichlet_du, {0}, 0.0, std::nullopt, 5.0});
        bcs.push_back({"x+", BcKind::dirichlet_du, {0}, 0.0, std::nullopt, 5.0});
    }
    bcs.push_back({"x+", BcKind::traction, {0}, bar.t, std::nullopt, 5.0});
    return Problem{make_box_patch(1, {0.0, 0.0, 0.0}, {bar.L, 1.0, 1.0}, {bar.elements, 1, 1}, bar.degree), m,
                   bar.measure, bcs, bar.tangent, 1};
}

double seminorm_error(const NonlinearSystem& system, const Eigen::VectorXd& U, const ExactFn& exact, int m) {
    if (m != 1 && m != 2) throw InvalidInput("seminorm_error: m must be 1 or 2");
    const Patch& patch = system.patch();
    const int nc = system.num_components();
    const int dim = patch.dim();
    const QuadratureRule rule = make_quadrature(patch, 1);
    double sum = 0.0;
    Mat3<double> g;
    Tens3<double> h;
    for (std::size_t e = 0; e < patch.num_elements(); ++e) {
        const Eigen::VectorXd u = system.gather(U, e);
        const std::span<const double> us(u.data(), static_cast<std::size_t>(u.size()));
        const double scale = patch.parametric_scale(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const PhysicalBasis pb = physical_basis(patch, e, patch.parametric_point(e, rule.points[q]));
            kernels::displacement_gradients<double>(pb, nc, us, g, h);
            const ExactField ex = exact(pb.map.x);
            double d2 = 0.0;
            for (int i = 0; i < nc; ++i)
                for (int J = 0; J < dim; ++J) {
                    if (m == 1) {
                        const double d = ex.grad[idx(i)][idx(J)] - g[idx(i)][idx(J)];
                        d2 += d * d;
                    } else {
                        for (int K = 0; K < dim; ++K) {
                            const double d = ex.hess[idx(i)][idx(J)][idx(K)] - h[idx(i)][idx(J)][idx(K)];
                            d2 += d * d;
                        }
                    }
                }
            sum += rule.weights[q] * scale * pb.map.det * d2;
        }
    }
    return std::sqrt(sum);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("loglog_slope: need two or more points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ErrorTable convergence_study(const Bar1d& base, const std::vector<int>& meshes, int degree, const NewtonConfig& cfg) {
    if (meshes.empty()) throw InvalidInput("convergence study: empty mesh list");
    ErrorTable table;
    table.degree = degree;
    for (int n : meshes) {
        Bar1d bar = base;
        bar.elements = n;
        bar.degree = degree;
        const NonlinearSystem sys(make_bar_1d(bar));
        const SolveReport rep = newton_solve(sys, cfg);
        const ExactFn exact = [&](const Point3& x) {
            const Exact1d a = analytic_1d(std::clamp(x[0], 0.0, bar.L), bar.mu, bar.l, bar.t, bar.L);
            ExactField f;
            f.u[0] = a.u;
            f.grad[0][0] = a.du;
            f.hess[0][0][0] = a.d2u;
            return f;
        };
        ErrorRow row;
        row.elements = n;
        row.h = bar.L / n;
        row.h1 = seminorm_error(sys, rep.U, exact, 1);
        row.h2 = seminorm_error(sys, rep.U, exact, 2);
        row.h1_rate = row.h2_rate = std::numeric_limits<double>::quiet_NaN();
        if (!table.rows.empty()) {
            const auto& prev = table.rows.back();
            row.h1_rate = std::log(prev.h1 / row.h1) / std::log(prev.h / row.h);
            row.h2_rate = std::log(prev.h2 / row.h2) / std::log(prev.h / row.h);
        }
        table.rows.push_back(row);
    }
    if (table.rows.size() >= 2) {
        std::vector<double> hs, e1, e2;
        for (const auto& r : table.rows) {
            hs.push_back(r.h);
            e1.push_back(r.h1);
            e2.push_back(r.h2);
        }
        table.h1_slope = loglog_slope(hs, e1);
        table.h2_slope = loglog_slope(hs, e2);
    }
    return table;
}

EnergySplit energy_split(const NonlinearSystem& system, const Eigen::VectorXd& U) {
    const Patch& patch = system.patch();
    const int nc = system.num_components();
    const QuadratureRule rule = make_quadrature(patch);
    const auto& mat = system.problem().material;
    EnergySplit out;
    Mat3<double> g;
    Tens3<double> h;
    for (std::size_t e = 0; e < patch.num_elements(); ++e) {
        const Eigen::VectorXd u = system.gather(U, e);
        const std::span<const double> us(u.data(), static_cast<std::size_t>(u.size()));
        const double scale = patch.parametric_scale(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const PhysicalBasis pb = physical_basis(patch, e, patch.parametric_point(e, rule.points[q]));
            kernels::displacement_gradients<double>(pb, nc, us, g, h);
            const auto w = energy_parts(compute_kinematics(g, h, system.problem().measure, e), mat);
            const double dv = rule.weights[q] * scale * pb.map.det;
            out.strain += dv * w.strain;
            out.gradient += dv * w.gradient;
        }
    }
    out.total = out.strain + out.gradient;
    return out;
}

std::vector<FieldSample> field_probe(const NonlinearSystem& system, const Eigen::VectorXd& U,
                                     const std::vector<Point3>& points) {
    const Patch& patch = system.patch();
    const int nc = system.num_components();
    const auto& mat = system.problem().material;
    std::vector<FieldSample> out;
    out.reserve(points.size());
    Mat3<double> g;
    Tens3<double> h;
    for (const Point3& xi : points) {
        const std::size_t e = patch.locate(xi);
        const Eigen::VectorXd u = system.gather(U, e);
        const std::span<const double> us(u.data(), static_cast<std::size_t>(u.size()));
        const PhysicalBasis pb = physical_basis(patch, e, xi);
        kernels::displacement_gradients<double>(pb, nc, us, g, h);
        FieldSample s;
        s.xi = xi;
        s.x = pb.map.x;
        for (std::size_t a = 0; a < pb.size(); ++a)
            for (int i = 0; i < nc; ++i) s.u[idx(i)] += pb.values[a] * us[a * idx(nc) + idx(i)];
        s.magnitude = std::sqrt(s.u[0] * s.u[0] + s.u[1] * s.u[1] + s.u[2] * s.u[2]);
        s.kin = compute_kinematics(g, h, system.problem().measure, e);
        s.stress = stresses(s.kin, mat);
        s.current = cauchy_pushforward(s.kin, s.stress);
        s.energy = energy_parts(s.kin, mat);
        out.push_back(s);
    }
    return out;
}

Point3 displacement_at(const NonlinearSystem& system, const Eigen::VectorXd& U, const Point3& xi) {
    const Patch& patch = system.patch();
    const int nc = system.num_components();
    const std::size_t e = patch.locate(xi);
    const auto spans = patch.element_spans(e);
    std::array<std::vector<double>, 3> b{std::vector<double>{1.0}, std::vector<double>{1.0}, std::vector<double>{1.0}};
    for (int d = 0; d < patch.dim(); ++d) b[idx(d)] = span_values(patch.knot_vector(d), spans[idx(d)], xi[idx(d)]);
    const auto funcs = patch.element_functions(e);
    const auto& dofs = system.element_dofs(e);
    Point3 u{0.0, 0.0, 0.0};
    double W = 0.0;
    std::size_t a = 0;
    for (double bk : b[2])
        for (double bj : b[1])
            for (double bi : b[0]) {
                const double v = bi * bj * bk * patch.weights()[funcs[a]];
                W += v;
                for (int i = 0; i < nc; ++i) u[idx(i)] += v * U(static_cast<Eigen::Index>(dofs[a * idx(nc) + idx(i)]));
                ++a;
            }
    for (auto& c : u) c /= W;
    return u;
}

double max_displacement(const NonlinearSystem& system, const Eigen::VectorXd& U, int per_element) {
    if (per_element < 1) throw InvalidInput("max_displacement: need at least one subdivision");
    const Patch& patch = system.patch();
    const int nc = system.num_components();
    const int dim = patch.dim();
    const int ns = per_element + 1;
    double best = 0.0;
    for (std::size_t e = 0; e < patch.num_elements(); ++e) {
        const auto spans = patch.element_spans(e);
        const auto box = patch.element_box(e);
        const auto funcs = patch.element_functions(e);
        const auto& dofs = system.element_dofs(e);
        // basis tables per direction: [sample][local]
        std::array<std::vector<std::vector<double>>, 3> tab;
        for (int d = 0; d < 3; ++d) {
            if (d >= dim) {
                tab[idx(d)] = {std::vector<double>{1.0}};
                continue;
            }
            for (int s = 0; s < ns; ++s) {
                const double xi = box[idx(d)][0] + (box[idx(d)][1] - box[idx(d)][0]) * s / per_element;
                tab[idx(d)].push_back(span_values(patch.knot_vector(d), spans[idx(d)], xi));
            }
        }
        for (const auto& bk : tab[2])
            for (const auto& bj : tab[1])
                for (const auto& bi : tab[0]) {
                    Point3 u{0.0, 0.0, 0.0};
                    double W = 0.0;
                    std::size_t a = 0;
                    for (double vk : bk)
                        for (double vj : bj)
                            for (double vi : bi) {
                                const double v = vi * vj * vk * patch.weights()[funcs[a]];
                                W += v;
                                for (int i = 0; i < nc; ++i) {
                                    u[idx(i)] += v * U(static_cast<Eigen::Index>(dofs[a * idx(nc) + idx(i)]));
                                }
                                ++a;
                            }
                    best = std::max(best, std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) / W);
                }
    }
    return best;
}

std::vector<std::array<double, 2>> strain_profile_1d(const NonlinearSystem& system, const Eigen::VectorXd& U,
                                                     int per_element) {
    const Patch& patch = system.patch();
    if (patch.dim() != 1) throw InvalidInput("strain_profile_1d: patch is not one-dimensional");
    std::vector<Point3> pts;
    for (std::size_t e = 0; e < patch.num_elements(); ++e) {
        const auto box = patch.element_box(e);
        const int first = e == 0 ? 0 : 1;
        for (int s = first; s <= per_element; ++s) {
            pts.push_back({box[0][0] + (box[0][1] - box[0][0]) * s / per_element, 0.0, 0.0});
        }
    }
    std::vector<std::array<double, 2>> out;
    for (const auto& f : field_probe(system, U, pts)) out.push_back({f.x[0], f.kin.E[0][0]});
    return out;
}

std::vector<Interface> find_interfaces(const std::vector<std::array<double, 2>>& profile, double e_low,
                                       double e_high) {
    std::vector<Interface> out;
    if (profile.size() < 2) return out;
    const double mid = 0.5 * (e_low + e_high);
    const double l10 = e_low + 0.1 * (e_high - e_low);
    const double l90 = e_low + 0.9 * (e_high - e_low);
    auto crossing = [&](std::size_t i, double level) {
        const auto& a = profile[i];
        const auto& b = profile[i + 1];
        const double s = (level - a[1]) / (b[1] - a[1]);
        return a[0] + s * (b[0] - a[0]);
    };
    auto between = [](double v, double a, double b) { return (v - a) * (v - b) <= 0.0 && a != b; };
    for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
        const double a = profile[i][1], b = profile[i + 1][1];
        if (!((a - mid) * (b - mid) < 0.0 || (b == mid && a != mid))) continue;
        Interface itf;
        itf.position = crossing(i, mid);
        // nearest 10% and 90% crossings on either side
        double x10 = itf.position, x90 = itf.position;
        const bool rising = b > a;
        const double left_level = rising ? l10 : l90;
        const double right_level = rising ? l90 : l10;
        for (std::size_t j = i + 1; j-- > 0;) {
            if (between(left_level, profile[j][1], profile[j + 1][1])) {
                x10 = crossing(j, left_level);
                break;
            }
        }
        for (std::size_t j = i; j + 1 < profile.size(); ++j) {
            if (between(right_level, profile[j][1], profile[j + 1][1])) {
                x90 = crossing(j, right_level);
                break;
            }
        }
        itf.width = std::abs(x90 - x10);
        out.push_back(itf);
    }
    return out;
}

std::array<double, 3> multiwell_stationary_points() {
    const double s = std::sqrt(7.0);
    return {0.5 * (1.0 - s), 0.0, 0.5 * (1.0 + s)};
}

}  // namespace gradiga
