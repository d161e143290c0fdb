// Acceptance runs: one line per criterion, exit status 0 when every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gradiga/analysis.hpp"
#include "gradiga/config.hpp"
#include "gradiga/errors.hpp"
#include "gradiga/kernels.hpp"
#include "gradiga/material.hpp"
#include "gradiga/splines.hpp"
#include "oracles.hpp"

using namespace gradiga;
using json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "[x] ") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json config_json(const std::string& name) {
    std::ifstream in(std::filesystem::path(GRADIGA_CONFIG_DIR) / (name + ".json"));
    if (!in) throw IoError("cannot read config " + name);
    return json::parse(in);
}

RunConfig with_mesh(json j, const std::array<int, 3>& elements, int degree) {
    j["geometry"]["elements"] = elements;
    j["geometry"]["degree"] = degree;
    j.erase("outputs");
    return parse_config(j.dump());
}

double u_max(const RunConfig& cfg) { return execute(cfg).u_max; }

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol * std::abs(target); }

// relative residuals above round-off, per load step
std::vector<double> above_floor(const std::vector<double>& norms) {
    std::vector<double> e;
    for (double r : norms)
        if (r / norms.front() > 1e-9) e.push_back(r / norms.front());
    return e;
}

// log(e_{k+1}/e_k) / log(e_k/e_{k-1}) on the last triple of every step that
// has one; smallest over steps
double worst_order(const SolveReport& rep) {
    double worst = 99.0;
    for (const auto& s : rep.steps) {
        const auto e = above_floor(s.residual_norms);
        const std::size_t n = e.size();
        if (n < 3) continue;
        worst = std::min(worst, std::log(e[n - 1] / e[n - 2]) / std::log(e[n - 2] / e[n - 3]));
    }
    return worst;
}

// |u|max under refinement until two meshes agree to 1%
struct Refined {
    double value = 0.0;
    double change = 1.0;
    std::string trail;
};

Refined refine(const json& base, const std::vector<std::array<int, 3>>& meshes, int degree) {
    Refined r;
    double prev = 0.0;
    for (const auto& m : meshes) {
        const double u = u_max(with_mesh(base, m, degree));
        r.trail += (r.trail.empty() ? "" : " -> ") + fmt("%.4g", u);
        if (prev > 0.0) r.change = std::abs(u - prev) / std::abs(u);
        r.value = u;
        prev = u;
        if (r.change < 0.01) break;
    }
    return r;
}

const std::vector<std::array<int, 3>> kBarMeshes{{1, 1, 10}, {2, 2, 20}, {3, 3, 30}, {4, 4, 40}};

Outcome criterion1() {
    Outcome out;
    for (double l : {0.01, 0.1, 1.0}) {
        const Stopwatch sw;
        Bar1d bar;
        bar.l = l;
        bar.elements = 100;
        const NonlinearSystem sys(make_bar_1d(bar));
        const SolveReport rep = newton_solve(sys, NewtonConfig{});
        double err = 0.0;
        double umax = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            const double x = k / 1000.0;
            const double ue = analytic_1d(x, bar.mu, l, bar.t, bar.L).u;
            err = std::max(err, std::abs(displacement_at(sys, rep.U, {x, 0.0, 0.0})[0] - ue));
            umax = std::max(umax, std::abs(ue));
        }
        const double t = sw.seconds();
        out.check(err <= 1e-3 * umax && t < 1.0,
                  "l=" + fmt("%g", l) + " rel err " + fmt("%.2e", err / umax) + " in " + fmt("%.2fs", t));
    }
    return out;
}

Outcome criterion2() {
    Outcome out;
    const Stopwatch sw;
    const std::vector<int> meshes{10, 20, 40, 80, 160};
    const double expect[2][2] = {{2.0, 1.0}, {3.0, 2.0}};
    for (int p : {2, 3}) {
        const ErrorTable t = convergence_study(Bar1d{}, meshes, p);
        const double h1 = t.h1_slope.value_or(0.0);
        const double h2 = t.h2_slope.value_or(0.0);
        out.check(std::abs(h1 - expect[p - 2][0]) <= 0.2 && std::abs(h2 - expect[p - 2][1]) <= 0.2,
                  "p=" + std::to_string(p) + " slopes H1 " + fmt("%.3f", h1) + " H2 " + fmt("%.3f", h2));
    }
    out.check(sw.seconds() < 10.0, fmt("%.1fs", sw.seconds()));
    return out;
}

Outcome criterion3() {
    Outcome out;
    Bar1d bar;
    bar.l = 0.1;
    bar.t = 1.0;
    // 40 spans keep the Du penalty's round-off floor below the tracked rates
    bar.elements = 40;
    NewtonConfig cfg;
    cfg.load_steps = 2;
    double tip[2] = {0.0, 0.0};
    for (auto m : {StrainMeasure::small, StrainMeasure::finite}) {
        bar.measure = m;
        const NonlinearSystem sys(make_bar_1d(bar));
        const SolveReport rep = newton_solve(sys, cfg);
        const int i = m == StrainMeasure::small ? 0 : 1;
        tip[i] = displacement_at(sys, rep.U, {1.0, 0.0, 0.0})[0];
        if (m == StrainMeasure::small) {
            // a linear problem: one correction reaches the round-off floor
            double first = 0.0;
            for (const auto& s : rep.steps) first = std::max(first, s.residual_norms[1] / s.residual_norms[0]);
            out.check(rep.converged && first < 1e-8, "small strain residual after one correction " + fmt("%.1e", first));
        } else {
            const double q = worst_order(rep);
            out.check(rep.converged && q > 1.6, "finite strain order " + fmt("%.2f", q));
        }
    }
    out.check(tip[1] < tip[0], "u(L) finite " + fmt("%.5f", tip[1]) + " < small " + fmt("%.5f", tip[0]));
    return out;
}

Outcome criterion4() {
    Outcome out;
    const struct {
        const char* config;
        double ref;
        double tol;
    } cases[] = {{"tension_l10", 0.613, 0.10}, {"tension_l100", 0.008, 0.20}, {"tension_l0", 2.76, 0.10}};
    for (const auto& c : cases) {
        const Refined r = refine(config_json(c.config), kBarMeshes, 3);
        out.check(r.change < 0.01 && within(r.value, c.ref, c.tol),
                  std::string(c.config) + " " + r.trail + " (ref " + fmt("%g", c.ref) + ")");
    }
    return out;
}

Outcome criterion5() {
    Outcome out;
    const json base = config_json("tension_l10");
    for (double l : {1.0, 2.0, 4.0, 10.0}) {
        json j = base;
        j["material"]["l"] = l;
        const RunResult r = execute(with_mesh(j, {2, 2, 20}, 3));
        const bool gradient_wins = r.energy.gradient >= r.energy.strain;
        const bool ok = l >= 4.0 ? gradient_wins : (l <= 2.0 ? !gradient_wins : true);
        out.check(ok, "l=" + fmt("%g", l) + " gradient/strain " + fmt("%.3f", r.energy.gradient / r.energy.strain));
    }
    return out;
}

Outcome criterion6() {
    Outcome out;
    const struct {
        const char* config;
        double ref;
        double tol;
    } cases[] = {{"bending_l0", 8.17, 0.15}, {"bending_l1", 1.96, 0.15}, {"bending_l10", 0.13, 0.20}};
    std::vector<double> values;
    for (const auto& c : cases) {
        const Refined r = refine(config_json(c.config), kBarMeshes, 3);
        values.push_back(r.value);
        out.check(r.change < 0.01 && within(r.value, c.ref, c.tol),
                  std::string(c.config) + " " + r.trail + " (ref " + fmt("%g", c.ref) + ")");
    }
    out.check(values[0] > values[1] && values[1] > values[2], "monotone in l");
    // relative change of |u|max when the Du condition is dropped, l = 1
    const auto influence = [](const char* name) {
        json j = config_json(name);
        const double with = u_max(with_mesh(j, {2, 2, 20}, 3));
        auto& bcs = j["bcs"];
        bcs.erase(std::remove_if(bcs.begin(), bcs.end(), [](const json& b) { return b["kind"] == "dirichlet-Du"; }),
                  bcs.end());
        const double without = u_max(with_mesh(j, {2, 2, 20}, 3));
        return std::abs(without - with) / with;
    };
    const double ib = influence("bending_l1");
    const double it = influence("tension_l1");
    out.check(ib < it, "Du influence bending " + fmt("%.3f", ib) + " vs tension " + fmt("%.3f", it));
    return out;
}

Outcome criterion7() {
    Outcome out;
    const double ref[] = {0.538, 0.099, 0.001};
    std::vector<double> values;
    int i = 0;
    for (const char* name : {"torsion_l0", "torsion_l1", "torsion_l10"}) {
        const RunConfig cfg = with_mesh(config_json(name), {2, 2, 20}, 3);
        const NonlinearSystem sys(cfg.problem);
        const RunResult r = execute(cfg, sys);
        values.push_back(r.u_max);
        const double ratio = r.u_max / ref[i];
        out.check(ratio >= 0.5 && ratio <= 2.0, std::string(name) + " " + fmt("%.4g", r.u_max) + " (ref " +
                                                    fmt("%g", ref[i]) + ")");
        if (i == 0) {
            // warping: axial displacement across the loaded end face
            double w = 0.0;
            for (int a = 0; a <= 10; ++a)
                for (int b = 0; b <= 10; ++b)
                    w = std::max(w, std::abs(displacement_at(sys, r.report.U, {a / 10.0, b / 10.0, 1.0})[2]));
            out.check(w > 1e-3 * r.u_max, "end-face warping max|u3| " + fmt("%.3g", w));
        }
        ++i;
    }
    out.check(values[0] > values[1] && values[1] > values[2], "strictly decreasing in l");
    return out;
}

Outcome criterion8() {
    Outcome out;
    for (const char* name : {"lineload_l0", "lineload_l0.1"}) {
        const json base = config_json(name);
        std::vector<double> u;
        for (int n : {1, 2, 4, 8, 16}) u.push_back(u_max(with_mesh(base, {n, n, n}, 2)));
        std::string trail;
        for (double v : u) trail += (trail.empty() ? "" : " -> ") + fmt("%.4g", v);
        if (std::string(name) == "lineload_l0") {
            double least = 1e9;
            for (std::size_t k = 1; k < u.size(); ++k) least = std::min(least, (u[k] - u[k - 1]) / u[k - 1]);
            out.check(least > 0.05, std::string("l=0 ") + trail + ", smallest increase " + fmt("%.3f", least));
        } else {
            const double last = std::abs(u[4] - u[3]) / u[4];
            out.check(last < 0.02, std::string("l=0.1 ") + trail + ", final change " + fmt("%.4f", last));
        }
    }
    return out;
}

Outcome criterion9() {
    Outcome out;
    const auto wells = multiwell_stationary_points();
    const json base = config_json("multiwell_1d");
    std::vector<double> widths;
    for (double l : {0.01, 0.02, 0.04}) {
        json j = base;
        j["material"]["l"] = l;
        j["initial"]["width"] = l;
        j.erase("outputs");
        const RunConfig cfg = parse_config(j.dump());
        const NonlinearSystem sys(cfg.problem);
        const RunResult r = execute(cfg, sys);
        const auto itf = find_interfaces(strain_profile_1d(sys, r.report.U, 20), wells[0], wells[2]);
        const double w = itf.size() == 1 ? itf[0].width : 0.0;
        widths.push_back(w);
        out.check(r.report.converged && itf.size() == 1,
                  "l=" + fmt("%g", l) + " interfaces " + std::to_string(itf.size()) + " width " + fmt("%.4f", w));
    }
    out.check(widths[0] < widths[1] && widths[1] < widths[2], "width grows with l");
    return out;
}

// AD vs FD, frame invariance, spline checks and the classical limit, timed
Outcome criterion10() {
    Outcome out;
    const Stopwatch sw;
    std::mt19937_64 rng(2024);

    double ad = 0.0;
    const BoundaryCondition du{"z-", BcKind::dirichlet_du, {0, 1, 2}, 0.0, std::nullopt, 5.0};
    for (int degree : {2, 3}) {
        for (auto measure : {StrainMeasure::finite, StrainMeasure::small}) {
            const NonlinearSystem sys(Problem{make_box_patch(3, {0, 0, 0}, {1, 1, 1}, {1, 1, 1}, degree),
                                              MaterialParams{1.0, 1.0, 0.4}, measure, {du}, TangentMode::pointwise, 1});
            std::uniform_real_distribution<double> u(-0.08, 0.08);
            const int states = degree == 2 ? 20 : 3;
            for (int s = 0; s < states; ++s) {
                Eigen::VectorXd x(static_cast<Eigen::Index>(sys.num_dofs()));
                for (auto& v : x) v = u(rng);
                for (auto mode : {TangentMode::pointwise, TangentMode::element}) {
                    if (degree == 3 && mode == TangentMode::element) continue;
                    Eigen::VectorXd r;
                    Eigen::MatrixXd K;
                    sys.element_system(0, x, 1.0, mode, r, &K);
                    const Eigen::MatrixXd fd = oracle::fd_jacobian(
                        [&](const Eigen::VectorXd& y) {
                            Eigen::VectorXd o;
                            sys.element_system(0, y, 1.0, TangentMode::pointwise, o, nullptr);
                            return o;
                        },
                        x, 1e-6);
                    ad = std::max(ad, oracle::relative_error(K, fd));
                }
            }
        }
    }
    out.check(ad <= 1e-6, "AD vs FD " + fmt("%.1e", ad));

    double frame = 0.0;
    const MaterialParams m{1.3, 0.8, 0.7};
    for (int t = 0; t < 200; ++t) {
        const Mat3<double> Q = oracle::random_rotation(rng);
        const Mat3<double> g = oracle::random_mat3(rng, 0.3);
        const Tens3<double> h = oracle::random_sym_tens3(rng, 1.0);
        Mat3<double> F = g;
        for (int i = 0; i < 3; ++i) F[i][i] += 1.0;
        Mat3<double> gq = matmul3(Q, F);
        for (int i = 0; i < 3; ++i) gq[i][i] -= 1.0;
        Tens3<double> hq = zero_tens3<double>();
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                for (int J = 0; J < 3; ++J)
                    for (int K = 0; K < 3; ++K) hq[i][J][K] += Q[i][k] * h[k][J][K];
        const auto k0 = compute_kinematics(g, h);
        const auto k1 = compute_kinematics(gq, hq);
        const auto s0 = stresses(k0, m);
        const auto s1 = stresses(k1, m);
        frame = std::max(frame, std::abs(energy_density(k0, m) - energy_density(k1, m)));
        Mat3<double> QP = matmul3(Q, s0.P);
        Tens3<double> QB = zero_tens3<double>();
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                for (int J = 0; J < 3; ++J)
                    for (int K = 0; K < 3; ++K) QB[i][J][K] += Q[i][k] * s0.B[k][J][K];
        frame = std::max({frame, oracle::max_abs_diff(QP, s1.P), oracle::max_abs_diff(QB, s1.B)});
    }
    out.check(frame <= 1e-12, "frame invariance/equivariance " + fmt("%.1e", frame));

    double pou = 0.0;
    double c1 = 0.0;
    std::uniform_real_distribution<double> xi(0.0, 1.0);
    for (int p = 2; p <= 4; ++p) {
        std::vector<double> knots(static_cast<std::size_t>(p + 1), 0.0);
        for (double v : {0.2, 0.45, 0.45, 0.7}) knots.push_back(v);
        knots.insert(knots.end(), static_cast<std::size_t>(p + 1), 1.0);
        const KnotVector kv(p, knots);
        for (int t = 0; t < 1000; ++t) {
            const BasisEval b = eval_basis(kv, xi(rng));
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (std::size_t a = 0; a < b.values.size(); ++a) {
                s0 += b.values[a];
                s1 += b.d1[a];
                s2 += b.d2[a];
            }
            pou = std::max({pou, std::abs(s0 - 1.0), std::abs(s1), std::abs(s2)});
        }
        // first derivatives match from both sides at simple knots
        for (double k : {0.2, 0.7}) {
            const int right = find_span(kv, k);
            const BasisEval l = eval_basis_on_span(kv, right - 1, k);
            const BasisEval r = eval_basis_on_span(kv, right, k);
            for (int i = 0; i < kv.num_basis(); ++i) {
                const auto at = [i](const BasisEval& e, bool d) {
                    const int off = i - (e.span - static_cast<int>(e.values.size()) + 1);
                    if (off < 0 || off >= static_cast<int>(e.values.size())) return 0.0;
                    return d ? e.d1[static_cast<std::size_t>(off)] : e.values[static_cast<std::size_t>(off)];
                };
                c1 = std::max({c1, std::abs(at(l, false) - at(r, false)), std::abs(at(l, true) - at(r, true))});
            }
        }
    }
    out.check(pou <= 1e-12, "partition of unity " + fmt("%.1e", pou));
    out.check(c1 <= 1e-6, "C1 at simple knots " + fmt("%.1e", c1));

    double classical = 0.0;
    for (int degree : {2, 3}) {
        const MaterialParams svk{1.3, 0.8, 0.0};
        const NonlinearSystem sys(Problem{make_box_patch(3, {0, 0, 0}, {1.0, 0.5, 2.0}, {2, 1, 2}, degree), svk,
                                          StrainMeasure::finite, {}, TangentMode::pointwise, 1});
        std::uniform_real_distribution<double> u(-0.1, 0.1);
        Eigen::VectorXd U(static_cast<Eigen::Index>(sys.num_dofs()));
        for (auto& v : U) v = u(rng);
        const auto res = sys.assemble_raw(U);
        Eigen::VectorXd R = Eigen::VectorXd::Zero(U.size());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(U.size(), U.size());
        for (std::size_t e = 0; e < sys.patch().num_elements(); ++e) {
            Eigen::VectorXd re;
            Eigen::MatrixXd ke;
            oracle::classical_svk_element(sys.patch(), e, sys.gather(U, e), svk.lambda, svk.mu, re, ke);
            const auto& dofs = sys.element_dofs(e);
            for (std::size_t i = 0; i < dofs.size(); ++i) {
                R(static_cast<Eigen::Index>(dofs[i])) += re(static_cast<Eigen::Index>(i));
                for (std::size_t j = 0; j < dofs.size(); ++j)
                    K(static_cast<Eigen::Index>(dofs[i]), static_cast<Eigen::Index>(dofs[j])) +=
                        ke(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
        classical = std::max({classical, oracle::relative_error(res.residual, R),
                              oracle::relative_error(Eigen::MatrixXd(res.jacobian), K)});
    }
    out.check(classical <= 1e-12, "classical limit " + fmt("%.1e", classical));
    out.check(sw.seconds() < 30.0, fmt("%.1fs", sw.seconds()));
    return out;
}

const std::vector<std::function<Outcome()>> kCriteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                      criterion6, criterion7, criterion8, criterion9, criterion10};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradiga acceptance criteria"};
    std::vector<int> selected;
    app.add_option("--criterion,-c", selected, "criteria to run (default all)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);
    if (selected.empty())
        for (int i = 1; i <= 10; ++i) selected.push_back(i);

    bool all = true;
    for (int c : selected) {
        const Stopwatch sw;
        Outcome o;
        try {
            o = kCriteria[static_cast<std::size_t>(c - 1)]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d: %s  (%.1fs) %s\n", c, o.pass ? "PASS" : "FAIL", sw.seconds(), o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
