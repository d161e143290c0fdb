#include "gradiga/solver.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>

#include "gradiga/errors.hpp"

namespace gradiga {

void validate(const NewtonConfig& cfg) {
    if (!(cfg.tol_rel > 0.0) || !(cfg.tol_abs > 0.0) || !(cfg.tol_step >= 0.0)) throw InvalidInput("newton: tolerances must be positive");
    if (cfg.load_steps < 1) throw InvalidInput("newton: load_steps must be >= 1");
    if (cfg.max_iter < 1) throw InvalidInput("newton: max_iter must be >= 1");
    if (cfg.max_bisections < 0) throw InvalidInput("newton: max_bisections must be >= 0");
}

namespace {

// Set once UMFPACK fails on a matrix that the fallback factors, or returns
// an inaccurate solve. Seen with some optimized BLAS builds.
std::atomic<bool> umfpack_unreliable{false};

}  // namespace

struct LinearSolver::Impl {
    Eigen::UmfPackLU<SparseMatrix> umf;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> slu;
    SparseMatrix copy;
    Eigen::Index umf_nnz = -1;
    Eigen::Index slu_nnz = -1;
    bool fallback = false;

    bool factorize_umfpack() {
        if (umf_nnz != copy.nonZeros()) {
            umf.analyzePattern(copy);
            umf_nnz = copy.nonZeros();
        }
        umf.factorize(copy);
        return umf.info() == Eigen::Success;
    }

    void factorize_sparselu() {
        if (slu_nnz != copy.nonZeros()) {
            slu.analyzePattern(copy);
            slu_nnz = copy.nonZeros();
        }
        slu.factorize(copy);
        fallback = true;
        if (slu.info() == Eigen::Success) return;
        // Zero pivot: the message ends with the 1-based permuted column.
        const std::string msg = slu.lastErrorMessage();
        std::size_t dof = 0;
        const auto pos = msg.find_last_not_of("0123456789");
        if (pos != std::string::npos && pos + 1 < msg.size()) {
            const int permuted = std::stoi(msg.substr(pos + 1)) - 1;
            const auto& perm = slu.colsPermutation().indices();
            for (Eigen::Index c = 0; c < perm.size(); ++c) {
                if (perm(c) == permuted) dof = static_cast<std::size_t>(c);
            }
        }
        throw SingularMatrix(dof, "sparse LU factorization failed");
    }

    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& r) const {
        return fallback ? Eigen::VectorXd(slu.solve(r)) : Eigen::VectorXd(umf.solve(r));
    }

    /// Iterative refinement; returns the final relative residual.
    double refine(const Eigen::VectorXd& r, Eigen::VectorXd& x) const {
        const double rn = r.norm();
        if (rn == 0.0) return 0.0;
        double rel = 0.0;
        for (int sweep = 0; sweep < 4; ++sweep) {
            const Eigen::VectorXd res = r - copy * x;
            rel = res.norm() / rn;
            if (rel <= 1e-12) break;
            x += apply(res);
        }
        return rel;
    }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;

void LinearSolver::factorize(const SparseMatrix& K) {
    if (K.rows() != K.cols()) throw InvalidInput("linear solve: matrix is not square");
    impl_->copy = K;
    impl_->copy.makeCompressed();
    impl_->fallback = false;
    if (!umfpack_unreliable.load() && impl_->factorize_umfpack()) return;
    const bool umf_failed = !umfpack_unreliable.load();
    impl_->factorize_sparselu();
    if (umf_failed) umfpack_unreliable.store(true);
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& r) const {
    Eigen::VectorXd x = impl_->apply(r);
    last_rel_ = impl_->refine(r, x);
    if ((last_rel_ > 1e-8 || !std::isfinite(last_rel_)) && !impl_->fallback) {
        umfpack_unreliable.store(true);
        impl_->factorize_sparselu();
        x = impl_->apply(r);
        last_rel_ = impl_->refine(r, x);
    }
    return x;
}

bool LinearSolver::using_fallback() const noexcept { return impl_->fallback; }

Eigen::VectorXd linear_solve(const SparseMatrix& K, const Eigen::VectorXd& r) {
    if (K.rows() != r.size()) throw InvalidInput("linear solve: size mismatch");
    LinearSolver s;
    s.factorize(K);
    return s.solve(r);
}

namespace {

// One load step from U (converged at the previous factor) to `factor`.
StepReport solve_step(const NonlinearSystem& sys, const NewtonConfig& cfg, LinearSolver& lin, Eigen::VectorXd& U,
                      double factor, std::mt19937_64& rng) {
    StepReport rep;
    rep.load_factor = factor;
    sys.apply_constraints(U, factor);
    double r0 = 0.0;
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    for (int it = 0;; ++it) {
        const bool last = it == cfg.max_iter;
        AssemblyResult a = sys.assemble(U, factor, true);
        const double rn = a.residual.norm();
        if (!std::isfinite(rn)) throw NonConvergence("newton: residual is not finite", rep.residual_norms);
        rep.residual_norms.push_back(rn);
        if (it == 0) r0 = rn;
        if (cfg.verbose) std::fprintf(stderr, "  load %.4f  iter %2d  |R| = %.6e\n", factor, it, rn);
        if (rn <= std::max(cfg.tol_abs, cfg.tol_rel * r0)) {
            rep.iterations = it;
            return rep;
        }
        if (last) break;
        if (cfg.jacobian_noise > 0.0) {
            // one factor per column: independent entry noise destroys the
            // cancellation in gradient-stiffness rows and diverges outright
            for (Eigen::Index c = 0; c < a.jacobian.outerSize(); ++c) {
                const double f = 1.0 + cfg.jacobian_noise * noise(rng);
                for (SparseMatrix::InnerIterator e(a.jacobian, c); e; ++e) e.valueRef() *= f;
            }
        }
        lin.factorize(a.jacobian);
        const Eigen::VectorXd dU = lin.solve(a.residual);
        U -= dU;
        const double un = U.norm();
        rep.step_norms.push_back(un > 0.0 ? dU.norm() / un : dU.norm());
        if (dU.norm() <= cfg.tol_step * un) {
            rep.residual_norms.push_back(sys.assemble(U, factor, false).residual.norm());
            rep.iterations = it + 1;
            rep.stalled = rep.residual_norms.back() > std::max(cfg.tol_abs, cfg.tol_rel * r0);
            return rep;
        }
    }
    throw NonConvergence("newton: no convergence in " + std::to_string(cfg.max_iter) + " iterations at load factor " +
                             std::to_string(factor),
                         rep.residual_norms);
}

}  // namespace

SolveReport newton_solve(const NonlinearSystem& system, const NewtonConfig& cfg,
                         const std::optional<Eigen::VectorXd>& initial) {
    validate(cfg);
    const auto n = static_cast<Eigen::Index>(system.num_dofs());
    SolveReport report;
    report.U = initial ? *initial : Eigen::VectorXd::Zero(n);
    if (report.U.size() != n) throw InvalidInput("newton: initial guess has wrong size");
    LinearSolver lin;
    std::mt19937_64 rng(cfg.noise_seed);

    double done = 0.0;
    double inc = 1.0 / cfg.load_steps;
    while (done < 1.0) {
        const double target = done + inc > 1.0 - 1e-12 ? 1.0 : done + inc;
        Eigen::VectorXd trial = report.U;
        try {
            report.steps.push_back(solve_step(system, cfg, lin, trial, target, rng));
        } catch (const ElementInversion&) {
            if (report.bisections >= cfg.max_bisections) throw;
            ++report.bisections;
            inc *= 0.5;
            continue;
        }
        report.U = std::move(trial);
        done = target;
    }
    report.converged = true;
    return report;
}

}  // namespace gradiga
