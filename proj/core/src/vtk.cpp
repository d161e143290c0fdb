#include "gradiga/vtk.hpp"

#include <cstdio>
#include <vector>

#include "gradiga/analysis.hpp"
#include "gradiga/errors.hpp"

namespace gradiga {

namespace {

/// Parametric sample coordinates along one direction, `density` per span.
std::vector<double> axis_samples(const KnotVector& kv, int density) {
    std::vector<double> out;
    for (int s : kv.spans()) {
        const double a = kv.knot(static_cast<std::size_t>(s));
        const double b = kv.knot(static_cast<std::size_t>(s) + 1);
        for (int k = 0; k < density; ++k) out.push_back(a + (b - a) * k / density);
    }
    out.push_back(kv.upper());
    return out;
}

}  // namespace

void export_vtk(const NonlinearSystem& system, const Eigen::VectorXd& U, const std::filesystem::path& path,
                int density) {
    if (density < 1) throw InvalidInput("export_vtk: density must be >= 1");
    const Patch& patch = system.patch();
    const int dim = patch.dim();
    std::array<std::vector<double>, 3> axes{std::vector<double>{0.0}, std::vector<double>{0.0},
                                            std::vector<double>{0.0}};
    for (int d = 0; d < dim; ++d) axes[static_cast<std::size_t>(d)] = axis_samples(patch.knot_vector(d), density);

    std::vector<Point3> pts;
    pts.reserve(axes[0].size() * axes[1].size() * axes[2].size());
    for (double z : axes[2])
        for (double y : axes[1])
            for (double x : axes[0]) pts.push_back({x, y, z});
    const std::vector<FieldSample> samples = field_probe(system, U, pts);

    FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw IoError("cannot write " + path.string());
    std::fprintf(f, "# vtk DataFile Version 3.0\ngradiga\nASCII\nDATASET STRUCTURED_GRID\n");
    std::fprintf(f, "DIMENSIONS %zu %zu %zu\n", axes[0].size(), axes[1].size(), axes[2].size());
    std::fprintf(f, "POINTS %zu double\n", samples.size());
    for (const auto& s : samples) {
        std::fprintf(f, "%.17g %.17g %.17g\n", s.x[0] + s.u[0], s.x[1] + s.u[1], s.x[2] + s.u[2]);
    }
    std::fprintf(f, "POINT_DATA %zu\nVECTORS displacement double\n", samples.size());
    for (const auto& s : samples) std::fprintf(f, "%.17g %.17g %.17g\n", s.u[0], s.u[1], s.u[2]);
    auto scalar = [&](const char* name, auto get) {
        std::fprintf(f, "SCALARS %s double 1\nLOOKUP_TABLE default\n", name);
        for (const auto& s : samples) std::fprintf(f, "%.17g\n", get(s));
    };
    scalar("u_magnitude", [](const FieldSample& s) { return s.magnitude; });
    scalar("strain_energy", [](const FieldSample& s) { return s.energy.strain; });
    scalar("gradient_energy", [](const FieldSample& s) { return s.energy.gradient; });
    scalar("detF", [](const FieldSample& s) { return s.kin.J; });
    if (std::fclose(f) != 0) throw IoError("cannot write " + path.string());
}

}  // namespace gradiga
