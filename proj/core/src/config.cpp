#include "gradiga/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gradiga/errors.hpp"

namespace gradiga {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError(where.empty() ? k : where + "." + k, "unknown key");
    }
}

const json& need(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where.empty() ? key : where + "." + key, "missing required key");
    return obj.at(key);
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
    return d;
}

int integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<int>();
}

std::string text(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
}

Point3 triple(const json& v, const std::string& key, int dim, double pad) {
    if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError(key, "expected an array of " + std::to_string(dim) + " numbers");
    }
    Point3 p{pad, pad, pad};
    for (int d = 0; d < dim; ++d) p[static_cast<std::size_t>(d)] = number(v[static_cast<std::size_t>(d)], key);
    return p;
}

BcKind parse_kind(const std::string& s, const std::string& key) {
    if (s == "dirichlet-u") return BcKind::dirichlet_u;
    if (s == "dirichlet-Du") return BcKind::dirichlet_du;
    if (s == "traction") return BcKind::traction;
    if (s == "moment") return BcKind::moment;
    if (s == "line-traction") return BcKind::line_traction;
    throw ConfigError(key, "unknown kind '" + s + "'");
}

std::vector<int> parse_components(const json& v, const std::string& key, int ncomp) {
    std::vector<int> out;
    if (v.is_string()) {
        if (v.get<std::string>() != "all") throw ConfigError(key, "expected \"all\" or a list of components");
        for (int c = 0; c < ncomp; ++c) out.push_back(c);
        return out;
    }
    if (v.is_number_integer()) {
        out.push_back(v.get<int>() - 1);
    } else if (v.is_array()) {
        for (const auto& c : v) out.push_back(integer(c, key) - 1);
    } else {
        throw ConfigError(key, "expected \"all\", a component number or a list");
    }
    if (out.empty()) throw ConfigError(key, "empty component list");
    for (int c : out) {
        if (c < 0 || c >= ncomp) throw ConfigError(key, "component " + std::to_string(c + 1) + " out of range 1.." + std::to_string(ncomp));
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    only_keys(root, "", {"name", "geometry", "material", "bcs", "solver", "outputs", "initial"});

    // geometry
    const json& geo = need(root, "", "geometry");
    only_keys(geo, "geometry", {"dim", "origin", "extents", "elements", "degree"});
    const int dim = integer(need(geo, "geometry", "dim"), "geometry.dim");
    if (dim < 1 || dim > 3) throw ConfigError("geometry.dim", "must be 1, 2 or 3");
    const Point3 origin = geo.contains("origin") ? triple(geo["origin"], "geometry.origin", dim, 0.0) : Point3{0.0, 0.0, 0.0};
    const Point3 extents = triple(need(geo, "geometry", "extents"), "geometry.extents", dim, 1.0);
    for (int d = 0; d < dim; ++d) {
        if (!(extents[static_cast<std::size_t>(d)] > 0.0)) throw ConfigError("geometry.extents", "must be positive");
    }
    const json& el = need(geo, "geometry", "elements");
    if (!el.is_array() || el.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError("geometry.elements", "expected " + std::to_string(dim) + " integers");
    }
    std::array<int, 3> elements{1, 1, 1};
    for (int d = 0; d < dim; ++d) {
        elements[static_cast<std::size_t>(d)] = integer(el[static_cast<std::size_t>(d)], "geometry.elements");
        if (elements[static_cast<std::size_t>(d)] < 1) throw ConfigError("geometry.elements", "must be >= 1");
    }
    const int degree = geo.contains("degree") ? integer(geo["degree"], "geometry.degree") : 2;
    if (degree < 1 || degree > 4) throw ConfigError("geometry.degree", "must be between 1 and 4");

    // material
    const json& mj = need(root, "", "material");
    only_keys(mj, "material", {"model", "lambda", "mu", "l", "kinematics"});
    MaterialParams mat;
    if (mj.contains("model")) {
        const std::string model = text(mj["model"], "material.model");
        if (model == "toupin-quadratic") {
            mat.model = MaterialModel::toupin_quadratic;
        } else if (model == "multiwell-1d") {
            mat.model = MaterialModel::multiwell_1d;
            if (dim != 1) throw ConfigError("material.model", "multiwell-1d needs geometry.dim = 1");
        } else {
            throw ConfigError("material.model", "unknown model '" + model + "'");
        }
    }
    mat.lambda = mj.contains("lambda") ? number(mj["lambda"], "material.lambda") : 0.0;
    mat.mu = number(need(mj, "material", "mu"), "material.mu");
    mat.l = mj.contains("l") ? number(mj["l"], "material.l") : 0.0;
    if (!(mat.mu > 0.0)) throw ConfigError("material.mu", "must be positive");
    if (!(mat.lambda >= 0.0)) throw ConfigError("material.lambda", "must be non-negative");
    if (!(mat.l >= 0.0)) throw ConfigError("material.l", "must be non-negative");
    StrainMeasure measure = StrainMeasure::finite;
    if (mj.contains("kinematics")) {
        const std::string k = text(mj["kinematics"], "material.kinematics");
        if (k == "small") {
            measure = StrainMeasure::small;
        } else if (k != "finite") {
            throw ConfigError("material.kinematics", "expected \"finite\" or \"small\"");
        }
    }

    // boundary conditions
    std::vector<BoundaryCondition> bcs;
    const json& bj = need(root, "", "bcs");
    if (!bj.is_array()) throw ConfigError("bcs", "expected a list");
    for (std::size_t i = 0; i < bj.size(); ++i) {
        const std::string key = "bcs[" + std::to_string(i) + "]";
        const json& b = bj[i];
        only_keys(b, key, {"face", "edge", "point", "kind", "components", "value", "twist", "C"});
        BoundaryCondition bc;
        int selectors = 0;
        for (const char* s : {"face", "edge", "point"}) {
            if (!b.contains(s)) continue;
            ++selectors;
            bc.selector = text(b[s], key + "." + s);
            std::array<int, 3> pinned{};
            try {
                pinned = parse_selector(bc.selector, dim);
            } catch (const InvalidInput& e) {
                throw ConfigError(key + "." + s, e.what());
            }
            int n = 0;
            for (int p : pinned) n += p >= 0 ? 1 : 0;
            const int want = std::string(s) == "face" ? 1 : std::string(s) == "edge" ? 2 : dim;
            if (n != want) throw ConfigError(key + "." + s, "'" + bc.selector + "' is not a " + s + " selector");
        }
        if (selectors != 1) throw ConfigError(key, "exactly one of face, edge, point is required");
        bc.kind = parse_kind(text(need(b, key, "kind"), key + ".kind"), key + ".kind");
        if (b.contains("twist")) {
            if (bc.kind != BcKind::traction) throw ConfigError(key + ".twist", "only valid for traction");
            if (b.contains("value") || b.contains("components")) {
                throw ConfigError(key + ".twist", "replaces value and components");
            }
            const json& t = b["twist"];
            only_keys(t, key + ".twist", {"tau", "center", "axis"});
            TwistField tw;
            tw.tau = number(need(t, key + ".twist", "tau"), key + ".twist.tau");
            tw.center = triple(need(t, key + ".twist", "center"), key + ".twist.center", 3, 0.0);
            tw.axis = integer(need(t, key + ".twist", "axis"), key + ".twist.axis") - 1;
            if (tw.axis < 0 || tw.axis > 2) throw ConfigError(key + ".twist.axis", "must be 1, 2 or 3");
            if (dim != 3) throw ConfigError(key + ".twist", "needs a 3D geometry");
            bc.twist = tw;
        } else {
            bc.components = parse_components(need(b, key, "components"), key + ".components", dim);
            bc.value = b.contains("value") ? number(b["value"], key + ".value") : 0.0;
        }
        if (b.contains("C")) {
            if (bc.kind != BcKind::dirichlet_du) throw ConfigError(key + ".C", "only valid for dirichlet-Du");
            bc.penalty = number(b["C"], key + ".C");
            if (!(bc.penalty > 0.0)) throw ConfigError(key + ".C", "must be positive");
        }
        bcs.push_back(bc);
    }

    // solver
    NewtonConfig newton;
    TangentMode tangent = TangentMode::pointwise;
    int threads = 0;
    if (root.contains("solver")) {
        const json& sj = root["solver"];
        only_keys(sj, "solver",
                  {"tol_rel", "tol_abs", "tol_step", "max_iter", "load_steps", "max_bisections", "tangent", "threads",
                   "verbose"});
        if (sj.contains("tol_rel")) newton.tol_rel = number(sj["tol_rel"], "solver.tol_rel");
        if (sj.contains("tol_abs")) newton.tol_abs = number(sj["tol_abs"], "solver.tol_abs");
        if (sj.contains("tol_step")) newton.tol_step = number(sj["tol_step"], "solver.tol_step");
        if (sj.contains("max_iter")) newton.max_iter = integer(sj["max_iter"], "solver.max_iter");
        if (sj.contains("load_steps")) newton.load_steps = integer(sj["load_steps"], "solver.load_steps");
        if (sj.contains("max_bisections")) newton.max_bisections = integer(sj["max_bisections"], "solver.max_bisections");
        if (sj.contains("threads")) threads = integer(sj["threads"], "solver.threads");
        if (sj.contains("verbose")) {
            if (!sj["verbose"].is_boolean()) throw ConfigError("solver.verbose", "expected true or false");
            newton.verbose = sj["verbose"].get<bool>();
        }
        if (sj.contains("tangent")) {
            const std::string t = text(sj["tangent"], "solver.tangent");
            if (t == "element") {
                tangent = TangentMode::element;
            } else if (t != "pointwise") {
                throw ConfigError("solver.tangent", "expected \"pointwise\" or \"element\"");
            }
        }
        if (!(newton.tol_rel > 0.0)) throw ConfigError("solver.tol_rel", "must be positive");
        if (!(newton.tol_abs > 0.0)) throw ConfigError("solver.tol_abs", "must be positive");
        if (!(newton.tol_step >= 0.0)) throw ConfigError("solver.tol_step", "must be non-negative");
        if (newton.max_iter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
        if (newton.load_steps < 1) throw ConfigError("solver.load_steps", "must be >= 1");
        if (newton.max_bisections < 0) throw ConfigError("solver.max_bisections", "must be >= 0");
        if (threads < 0) throw ConfigError("solver.threads", "must be >= 0");
    }

    OutputConfig out;
    if (root.contains("outputs")) {
        const json& oj = root["outputs"];
        only_keys(oj, "outputs", {"vtk", "csv", "probe_density", "vtk_density"});
        if (oj.contains("vtk")) out.vtk = text(oj["vtk"], "outputs.vtk");
        if (oj.contains("csv")) out.csv = text(oj["csv"], "outputs.csv");
        if (oj.contains("probe_density")) out.probe_density = integer(oj["probe_density"], "outputs.probe_density");
        if (oj.contains("vtk_density")) out.vtk_density = integer(oj["vtk_density"], "outputs.vtk_density");
        if (out.probe_density < 1) throw ConfigError("outputs.probe_density", "must be >= 1");
        if (out.vtk_density < 1) throw ConfigError("outputs.vtk_density", "must be >= 1");
    }

    std::optional<LaminateGuess> initial;
    if (root.contains("initial")) {
        const json& ij = root["initial"];
        only_keys(ij, "initial", {"type", "strains", "width"});
        if (text(need(ij, "initial", "type"), "initial.type") != "laminate") {
            throw ConfigError("initial.type", "only \"laminate\" is supported");
        }
        if (dim != 1) throw ConfigError("initial", "laminate start needs geometry.dim = 1");
        const json& s = need(ij, "initial", "strains");
        if (!s.is_array() || s.size() != 2) throw ConfigError("initial.strains", "expected two numbers");
        LaminateGuess g;
        g.e_first = number(s[0], "initial.strains");
        g.e_second = number(s[1], "initial.strains");
        if (g.e_first * g.e_second >= 0.0) throw ConfigError("initial.strains", "need one positive and one negative strain");
        g.width = ij.contains("width") ? number(ij["width"], "initial.width") : 0.0;
        if (!(g.width >= 0.0)) throw ConfigError("initial.width", "must be non-negative");
        initial = g;
    }

    RunConfig cfg{root.contains("name") ? text(root["name"], "name") : std::string("run"),
                  Problem{make_box_patch(dim, origin, extents, elements, degree), mat, measure, bcs, tangent, threads},
                  newton, out, initial};
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Eigen::VectorXd laminate_initial_guess(const NonlinearSystem& system, const LaminateGuess& g) {
    const Patch& patch = system.patch();
    if (patch.dim() != 1) throw InvalidInput("laminate guess: patch is not one-dimensional");
    const auto& kv = patch.knot_vector(0);
    const double x_lo = patch.control_points().front()[0];
    const double x_hi = patch.control_points().back()[0];
    const double L = x_hi - x_lo;
    // sharp-interface position giving zero end displacement
    const double x0 = g.e_second * L / (g.e_second - g.e_first);
    auto logcosh = [](double z) { return std::abs(z) + std::log1p(std::exp(-2.0 * std::abs(z))) - std::log(2.0); };
    // E(s) = e1 + (e2 - e1) (1 + tanh((s - x0)/w)) / 2
    auto u0 = [&](double s) {
        if (g.width <= 0.0) return s <= x0 ? g.e_first * s : g.e_first * x0 + g.e_second * (s - x0);
        const double w = g.width;
        const double jump = g.e_second - g.e_first;
        return g.e_first * s + 0.5 * jump * (s + w * (logcosh((s - x0) / w) - logcosh(-x0 / w)));
    };
    const double end = u0(L);
    Eigen::VectorXd U = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.num_dofs()));
    for (int a = 0; a < kv.num_basis(); ++a) {
        const double s = kv.greville(a) * L;
        // remove the small end mismatch from the smoothed profile
        U(static_cast<Eigen::Index>(system.dof(static_cast<std::size_t>(a), 0))) = u0(s) - end * s / L;
    }
    return U;
}

RunResult execute(const RunConfig& cfg, const NonlinearSystem& system) {
    RunResult r;
    std::optional<Eigen::VectorXd> start;
    if (cfg.initial) start = laminate_initial_guess(system, *cfg.initial);
    r.report = newton_solve(system, cfg.newton, start);
    r.u_max = max_displacement(system, r.report.U, cfg.outputs.probe_density);
    r.energy = energy_split(system, r.report.U);
    return r;
}

RunResult execute(const RunConfig& cfg) {
    const NonlinearSystem system(cfg.problem);
    return execute(cfg, system);
}

void write_summary_csv(const std::filesystem::path& path, const RunConfig& cfg, const RunResult& result) {
    auto open = [](const std::filesystem::path& p) {
        FILE* f = std::fopen(p.string().c_str(), "w");
        if (f == nullptr) throw IoError("cannot write " + p.string());
        return f;
    };
    FILE* f = open(path);
    int iterations = 0;
    for (const auto& s : result.report.steps) iterations += s.iterations;
    std::fprintf(f, "quantity,value\n");
    std::fprintf(f, "name,%s\n", cfg.name.c_str());
    std::fprintf(f, "l,%.17g\n", cfg.problem.material.l);
    std::fprintf(f, "u_max,%.17g\n", result.u_max);
    std::fprintf(f, "energy_strain,%.17g\n", result.energy.strain);
    std::fprintf(f, "energy_gradient,%.17g\n", result.energy.gradient);
    std::fprintf(f, "energy_total,%.17g\n", result.energy.total);
    std::fprintf(f, "load_steps,%zu\n", result.report.steps.size());
    std::fprintf(f, "newton_iterations,%d\n", iterations);
    std::fprintf(f, "bisections,%d\n", result.report.bisections);
    std::fprintf(f, "converged,%d\n", result.report.converged ? 1 : 0);
    const bool ok = std::fclose(f) == 0;
    if (!ok) throw IoError("cannot write " + path.string());

    std::filesystem::path hist = path;
    hist.replace_filename(path.stem().string() + "_newton.csv");
    FILE* h = open(hist);
    std::fprintf(h, "step,load_factor,iteration,residual_norm\n");
    for (std::size_t s = 0; s < result.report.steps.size(); ++s) {
        const auto& st = result.report.steps[s];
        for (std::size_t k = 0; k < st.residual_norms.size(); ++k) {
            std::fprintf(h, "%zu,%.17g,%zu,%.17g\n", s + 1, st.load_factor, k, st.residual_norms[k]);
        }
    }
    if (std::fclose(h) != 0) throw IoError("cannot write " + hist.string());
}

}  // namespace gradiga
