#pragma once

// Closed-form 1D reference, error seminorms, convergence tables, energy
// partition and pointwise postprocessing.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gradiga/assembly.hpp"
#include "gradiga/kinematics.hpp"
#include "gradiga/material.hpp"
#include "gradiga/solver.hpp"

namespace gradiga {

struct Exact1d {
    double u = 0.0;
    double du = 0.0;
    double d2u = 0.0;
};

/// Bar with u(0) = 0, u'(0) = u'(L) = 0 and end traction t: stress mu u',
/// hyperstress mu l^2 u''. Evaluated with non-positive exponents only, so
/// any L/l is safe. Requires l > 0, mu > 0, 0 <= x <= L.
Exact1d analytic_1d(double x, double mu, double l, double t, double L);

struct Bar1d {
    double mu = 1.0;
    double l = 0.1;
    double t = 1.0;
    double L = 1.0;
    int elements = 100;
    int degree = 2;
    StrainMeasure measure = StrainMeasure::small;
    TangentMode tangent = TangentMode::pointwise;
};

/// The 1D bar as a Problem. The 3D energy reduces to the 1D stress pair above
/// with lambda = 0, mu_3d = mu / 2 and l_3d = sqrt(2) l.
Problem make_bar_1d(const Bar1d& bar);

/// Displacement, gradient and second gradient at a physical point.
struct ExactField {
    Point3 u{};
    Mat3<double> grad{};
    Tens3<double> hess{};
};
using ExactFn = std::function<ExactField(const Point3&)>;

/// (int |D^m u - D^m u_h|^2)^{1/2} over the patch with p+2 Gauss points per direction.
double seminorm_error(const NonlinearSystem& system, const Eigen::VectorXd& U, const ExactFn& exact, int m);

struct ErrorRow {
    int elements = 0;
    double h = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    /// slope against the previous row (NaN for the first)
    double h1_rate = 0.0;
    double h2_rate = 0.0;
};

struct ErrorTable {
    int degree = 2;
    std::vector<ErrorRow> rows;
    /// least-squares slopes of log error against log h (need >= 2 rows)
    std::optional<double> h1_slope;
    std::optional<double> h2_slope;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Small-strain 1D bar solved on each mesh and compared with analytic_1d.
/// Throws InvalidInput for an empty mesh list.
ErrorTable convergence_study(const Bar1d& base, const std::vector<int>& meshes, int degree,
                             const NewtonConfig& cfg = {});

struct EnergySplit {
    double strain = 0.0;
    double gradient = 0.0;
    double total = 0.0;
};

EnergySplit energy_split(const NonlinearSystem& system, const Eigen::VectorXd& U);

struct FieldSample {
    Point3 xi{};
    Point3 x{};
    Point3 u{};
    double magnitude = 0.0;
    Kinematics<double> kin{};
    StressState<double> stress{};
    CurrentStress current{};
    EnergyParts<double> energy{};
};

/// Fields at parametric points. Throws DomainError outside the patch.
std::vector<FieldSample> field_probe(const NonlinearSystem& system, const Eigen::VectorXd& U,
                                     const std::vector<Point3>& points);

/// Displacement only, at one parametric point.
Point3 displacement_at(const NonlinearSystem& system, const Eigen::VectorXd& U, const Point3& xi);

/// max |u| over a grid of `per_element` subdivisions per element and direction
/// (end points included).
double max_displacement(const NonlinearSystem& system, const Eigen::VectorXd& U, int per_element = 10);

/// E11 along a 1D patch: (x, E11) at `per_element` subdivisions per element.
std::vector<std::array<double, 2>> strain_profile_1d(const NonlinearSystem& system, const Eigen::VectorXd& U,
                                                     int per_element = 10);

struct Interface {
    /// x where E11 crosses the mid value between the wells
    double position = 0.0;
    /// distance between the 10% and 90% crossings
    double width = 0.0;
};

/// Transitions between the wells e_low < e_high in a sampled profile.
std::vector<Interface> find_interfaces(const std::vector<std::array<double, 2>>& profile, double e_low,
                                       double e_high);

/// Roots of dW/dE of the multiwell potential, ascending: negative well, 0, positive well.
std::array<double, 3> multiwell_stationary_points();

}  // namespace gradiga
