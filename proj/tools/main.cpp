// gradiga command line: run a JSON-configured problem, the 1D analytic check,
// or the 1D convergence study.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gradiga/analysis.hpp"
#include "gradiga/config.hpp"
#include "gradiga/errors.hpp"
#include "gradiga/vtk.hpp"

namespace {

using namespace gradiga;

constexpr int exit_config = 2;
constexpr int exit_nonconvergence = 3;
constexpr int exit_io = 4;

FILE* open_or_stdout(const std::string& path) {
    if (path.empty() || path == "-") return stdout;
    FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw IoError("cannot write " + path);
    return f;
}

void close_checked(FILE* f, const std::string& path) {
    if (f == stdout) {
        std::fflush(f);
        return;
    }
    if (std::fclose(f) != 0) throw IoError("cannot write " + path);
}

int cmd_run(const std::string& path) {
    const RunConfig cfg = load_config(path);
    const NonlinearSystem system(cfg.problem);
    std::fprintf(stderr, "%s: %zu dofs, %zu elements, %d threads\n", cfg.name.c_str(), system.num_dofs(),
                 cfg.problem.patch.num_elements(), system.worker_count());
    const RunResult r = execute(cfg, system);
    std::printf("u_max %.10g\n", r.u_max);
    std::printf("energy_strain %.10g\nenergy_gradient %.10g\nenergy_total %.10g\n", r.energy.strain,
                r.energy.gradient, r.energy.total);
    if (!cfg.outputs.csv.empty()) write_summary_csv(cfg.outputs.csv, cfg, r);
    if (!cfg.outputs.vtk.empty()) export_vtk(system, r.report.U, cfg.outputs.vtk, cfg.outputs.vtk_density);
    return 0;
}

struct Validate1dArgs {
    double l = 1.0;
    double mu = 1.0;
    double t = 1.0;
    double L = 1.0;
    int N = 100;
    int degree = 2;
    std::string mode = "small";
    std::string tangent = "pointwise";
    std::string csv;
};

int cmd_validate_1d(const Validate1dArgs& a) {
    Bar1d bar;
    bar.mu = a.mu;
    bar.l = a.l;
    bar.t = a.t;
    bar.L = a.L;
    bar.elements = a.N;
    bar.degree = a.degree;
    bar.measure = a.mode == "finite" ? StrainMeasure::finite : StrainMeasure::small;
    bar.tangent = a.tangent == "element" ? TangentMode::element : TangentMode::pointwise;
    if (!(a.mu > 0.0)) throw ConfigError("--mu", "must be positive");
    if (!(a.l >= 0.0)) throw ConfigError("--l", "must be non-negative");
    if (!(a.L > 0.0)) throw ConfigError("--L", "must be positive");
    const NonlinearSystem system(make_bar_1d(bar));
    NewtonConfig cfg;
    cfg.load_steps = bar.measure == StrainMeasure::small ? 1 : 10;
    const SolveReport rep = newton_solve(system, cfg);

    const bool exact = a.l > 0.0;
    const int per = 10;
    FILE* f = open_or_stdout(a.csv);
    if (!a.csv.empty()) std::fprintf(f, "x,u_h,u_exact,error\n");
    double max_err = 0.0;
    double max_u = 0.0;
    for (int e = 0; e < a.N; ++e) {
        for (int k = 0; k <= per; ++k) {
            if (k == per && e + 1 < a.N) continue;
            const double xi = (e + static_cast<double>(k) / per) / a.N;
            const double x = xi * a.L;
            const double uh = displacement_at(system, rep.U, {xi, 0.0, 0.0})[0];
            const double ue = exact ? analytic_1d(x, a.mu, a.l, a.t, a.L).u : std::nan("");
            const double err = exact ? std::abs(uh - ue) : std::nan("");
            if (exact) {
                max_err = std::max(max_err, err);
                max_u = std::max(max_u, std::abs(ue));
            }
            if (!a.csv.empty()) std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", x, uh, ue, err);
        }
    }
    close_checked(f, a.csv);
    int iterations = 0;
    for (const auto& s : rep.steps) iterations += s.iterations;
    std::printf("mode %s, N %d, degree %d, l %g: u_h(L) = %.10g, %d Newton iterations\n", a.mode.c_str(), a.N,
                a.degree, a.l, displacement_at(system, rep.U, {1.0, 0.0, 0.0})[0], iterations);
    if (exact) {
        std::printf("u(L) exact %.10g, max |u_h - u| = %.6e (relative %.6e)\n", analytic_1d(a.L, a.mu, a.l, a.t, a.L).u,
                    max_err, max_err / max_u);
    }
    return 0;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(key, "'" + item + "' is not an integer");
        }
    }
    return out;
}

int cmd_converge(const std::vector<int>& degrees, const std::vector<int>& meshes, double l, const std::string& csv) {
    if (meshes.empty()) throw ConfigError("--meshes", "empty mesh list");
    if (degrees.empty()) throw ConfigError("--degrees", "empty degree list");
    for (int p : degrees) {
        if (p < 2 || p > 4) throw ConfigError("--degrees", "degrees must be between 2 and 4");
    }
    for (int n : meshes) {
        if (n < 1) throw ConfigError("--meshes", "element counts must be >= 1");
    }
    Bar1d base;
    base.l = l;
    FILE* f = open_or_stdout(csv);
    std::fprintf(f, "degree,elements,h,H1,H2,H1_rate,H2_rate\n");
    std::vector<ErrorTable> tables;
    for (int p : degrees) {
        tables.push_back(convergence_study(base, meshes, p));
        for (const auto& r : tables.back().rows) {
            std::fprintf(f, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", p, r.elements, r.h, r.h1, r.h2, r.h1_rate,
                         r.h2_rate);
        }
    }
    for (const auto& t : tables) {
        if (t.h1_slope) std::fprintf(f, "# degree %d slope H1 %.17g H2 %.17g\n", t.degree, *t.h1_slope, *t.h2_slope);
    }
    close_checked(f, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradiga: finite-strain gradient elasticity on spline patches"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "solve a JSON-configured boundary value problem");
    run->add_option("config", config_path, "run configuration (JSON)")->required();

    Validate1dArgs v;
    auto* val = app.add_subcommand("validate-1d", "1D bar against the closed-form solution");
    val->add_option("--l", v.l, "length scale")->capture_default_str();
    val->add_option("--mu", v.mu, "shear modulus")->capture_default_str();
    val->add_option("--t", v.t, "end traction")->capture_default_str();
    val->add_option("--L", v.L, "bar length")->capture_default_str();
    val->add_option("--N", v.N, "elements")->capture_default_str()->check(CLI::PositiveNumber);
    val->add_option("--degree", v.degree, "spline degree")->capture_default_str()->check(CLI::Range(2, 4));
    val->add_option("--mode", v.mode, "strain measure")->capture_default_str()->check(CLI::IsMember({"small", "finite"}));
    val->add_option("--tangent", v.tangent, "tangent linearization")
        ->capture_default_str()
        ->check(CLI::IsMember({"pointwise", "element"}));
    val->add_option("--csv", v.csv, "write x,u_h,u_exact,error samples");

    std::vector<int> degrees{2, 3};
    std::string mesh_list = "10,20,40,80,160";
    double conv_l = 0.1;
    std::string conv_csv;
    auto* conv = app.add_subcommand("converge", "H1/H2 error convergence of the 1D bar");
    conv->add_option("--degrees", degrees, "spline degrees")->delimiter(',')->capture_default_str();
    conv->add_option("--meshes", mesh_list, "comma-separated element counts")->capture_default_str();
    conv->add_option("--l", conv_l, "length scale")->capture_default_str();
    conv->add_option("--csv", conv_csv, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_config;
    }

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (val->parsed()) return cmd_validate_1d(v);
        return cmd_converge(degrees, parse_int_list(mesh_list, "--meshes"), conv_l, conv_csv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return exit_config;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return exit_io;
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return exit_nonconvergence;
    } catch (const ElementInversion& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return exit_nonconvergence;
    } catch (const SingularMatrix& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return exit_nonconvergence;
    }
}
