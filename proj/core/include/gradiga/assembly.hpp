#pragma once

// Boundary conditions, the discrete nonlinear system, and residual/Jacobian
// assembly of the weak form with weakly enforced normal-derivative data.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gradiga/material.hpp"
#include "gradiga/mesh.hpp"

namespace gradiga {

enum class BcKind { dirichlet_u, dirichlet_du, traction, moment, line_traction };

std::string to_string(BcKind kind);

/// Dead tangential field tau * e_axis x (X - center).
struct TwistField {
    double tau = 0.0;
    Point3 center{};
    int axis = 2;
};

struct BoundaryCondition {
    /// face "x-", edge "x+z+" or point "x-y-z-"
    std::string selector;
    BcKind kind = BcKind::dirichlet_u;
    /// zero-based components the value applies to
    std::vector<int> components;
    double value = 0.0;
    /// traction only; replaces `value` and acts on all components
    std::optional<TwistField> twist;
    /// dirichlet_du penalty constant
    double penalty = 5.0;
};

enum class TangentMode {
    /// AD over the 27 kinematic variables at each quadrature point
    pointwise,
    /// AD over all element dofs (3 (p+1)^3 seeds in 3D)
    element
};

struct Problem {
    Patch patch;
    MaterialParams material;
    StrainMeasure measure = StrainMeasure::finite;
    std::vector<BoundaryCondition> bcs;
    TangentMode tangent = TangentMode::pointwise;
    /// 0 = GRADIGA_THREADS or hardware concurrency
    int threads = 0;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct AssemblyResult {
    Eigen::VectorXd residual;
    SparseMatrix jacobian;
};

/// Face quadrature point carrying weak normal-derivative data.
struct NitschePoint {
    Point3 xi{};
    double weight = 0.0;
    Point3 normal{};
    double element_size = 0.0;
    double penalty = 5.0;
    std::array<bool, 3> active{false, false, false};
    /// prescribed Du at full load
    std::array<double, 3> target{0.0, 0.0, 0.0};
};

class NonlinearSystem {
public:
    explicit NonlinearSystem(Problem problem);

    [[nodiscard]] const Problem& problem() const noexcept { return problem_; }
    [[nodiscard]] const Patch& patch() const noexcept { return problem_.patch; }
    [[nodiscard]] int num_components() const noexcept { return problem_.patch.dim(); }
    [[nodiscard]] std::size_t num_dofs() const noexcept { return num_dofs_; }
    [[nodiscard]] std::size_t dof(std::size_t function, int component) const noexcept {
        return function * static_cast<std::size_t>(num_components()) + static_cast<std::size_t>(component);
    }

    [[nodiscard]] const std::vector<char>& constrained() const noexcept { return constrained_; }
    /// Prescribed values at full load (zero for free dofs).
    [[nodiscard]] const Eigen::VectorXd& prescribed() const noexcept { return prescribed_; }
    /// Assembled dead loads at full load (traction, moment, line traction).
    [[nodiscard]] const Eigen::VectorXd& external_load() const noexcept { return external_; }
    [[nodiscard]] const SparseMatrix& pattern() const noexcept { return pattern_; }

    /// Writes factor * prescribed into the constrained entries of U.
    void apply_constraints(Eigen::VectorXd& U, double factor) const;

    /// Residual and (optionally) Jacobian with constrained rows and columns
    /// replaced by the identity and zero residual.
    [[nodiscard]] AssemblyResult assemble(const Eigen::VectorXd& U, double load_factor = 1.0,
                                          bool with_jacobian = true) const;

    /// Same, without the constraint treatment.
    [[nodiscard]] AssemblyResult assemble_raw(const Eigen::VectorXd& U, double load_factor = 1.0,
                                              bool with_jacobian = true) const;

    /// Element dofs, local order a * ncomp + i.
    [[nodiscard]] const std::vector<std::size_t>& element_dofs(std::size_t element) const {
        return element_dofs_[element];
    }

    /// Volume residual of one element (real evaluation).
    [[nodiscard]] Eigen::VectorXd element_residual(std::size_t element, const Eigen::VectorXd& local_u) const;
    /// Weak normal-derivative face terms of one element at load factor 1.
    [[nodiscard]] Eigen::VectorXd face_residual(std::size_t element, const Eigen::VectorXd& local_u) const;
    /// Element residual (volume + face) and Jacobian in the requested mode.
    void element_system(std::size_t element, const Eigen::VectorXd& local_u, double load_factor, TangentMode mode,
                        Eigen::VectorXd& r, Eigen::MatrixXd* k) const;

    [[nodiscard]] const std::vector<NitschePoint>& nitsche_points(std::size_t element) const {
        return nitsche_[element];
    }

    [[nodiscard]] Eigen::VectorXd gather(const Eigen::VectorXd& U, std::size_t element) const;

    [[nodiscard]] int worker_count() const noexcept { return threads_; }

private:
    void setup_boundary();
    void build_pattern();

    Problem problem_;
    std::size_t num_dofs_ = 0;
    std::vector<char> constrained_;
    Eigen::VectorXd prescribed_;
    Eigen::VectorXd external_;
    std::vector<std::vector<NitschePoint>> nitsche_;
    std::vector<std::vector<std::size_t>> element_dofs_;
    SparseMatrix pattern_;
    QuadratureRule volume_rule_;
    int threads_ = 1;
};

/// Worker count from GRADIGA_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

}  // namespace gradiga
