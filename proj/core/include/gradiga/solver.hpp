#pragma once

// Load-stepped Newton iteration and the sparse direct solve behind it.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gradiga/assembly.hpp"

namespace gradiga {

struct NewtonConfig {
    double tol_rel = 1e-10;
    double tol_abs = 1e-12;
    /// Also converged once a Newton correction is this small relative to U
    /// (the residual can stall above tol_rel at the round-off floor).
    double tol_step = 1e-12;
    int max_iter = 50;
    int load_steps = 10;
    int max_bisections = 5;
    /// Test hook: scales each Jacobian column by (1 + noise * u), u uniform in [-1, 1].
    double jacobian_noise = 0.0;
    std::uint64_t noise_seed = 1;
    /// Progress lines on stderr.
    bool verbose = false;
};

void validate(const NewtonConfig& cfg);

struct StepReport {
    double load_factor = 0.0;
    int iterations = 0;
    /// Assembled residual 2-norms, first entry before any update.
    std::vector<double> residual_norms;
    /// ||dU|| / ||U|| per correction
    std::vector<double> step_norms;
    /// accepted by tol_step rather than by the residual test
    bool stalled = false;
};

struct SolveReport {
    std::vector<StepReport> steps;
    Eigen::VectorXd U;
    bool converged = false;
    int bisections = 0;
};

/// Direct sparse LU (UMFPACK) with the symbolic analysis reused across
/// factorizations of the same pattern. Falls back to Eigen's SparseLU, for
/// the rest of the process, when UMFPACK fails on a matrix SparseLU can
/// factor or its solve does not reach a 1e-8 relative residual.
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    LinearSolver(const LinearSolver&) = delete;
    LinearSolver& operator=(const LinearSolver&) = delete;

    /// Throws SingularMatrix naming the dof of the first zero pivot.
    void factorize(const SparseMatrix& K);
    /// Solution refined until ||K x - r|| <= 1e-12 ||r|| or 4 refinement sweeps.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& r) const;
    /// Relative residual reached by the last solve.
    [[nodiscard]] double last_relative_residual() const noexcept { return last_rel_; }
    /// The current factorization came from the fallback.
    [[nodiscard]] bool using_fallback() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    mutable double last_rel_ = 0.0;
};

Eigen::VectorXd linear_solve(const SparseMatrix& K, const Eigen::VectorXd& r);

/// Starts from `initial` (or zero) with constrained dofs overwritten by the
/// scaled prescribed values. Throws NonConvergence after max_iter, and
/// ElementInversion once the bisection budget is spent.
SolveReport newton_solve(const NonlinearSystem& system, const NewtonConfig& cfg,
                         const std::optional<Eigen::VectorXd>& initial = std::nullopt);

}  // namespace gradiga
