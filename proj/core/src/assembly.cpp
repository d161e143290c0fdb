#include "gradiga/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include "gradiga/autodiff.hpp"
#include "gradiga/errors.hpp"
#include "gradiga/kernels.hpp"

namespace gradiga {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

Point3 bc_vector(const BoundaryCondition& bc, const Point3& X, int ncomp) {
    Point3 v{0.0, 0.0, 0.0};
    if (bc.twist) {
        const auto& t = *bc.twist;
        Point3 r{X[0] - t.center[0], X[1] - t.center[1], X[2] - t.center[2]};
        Point3 e{0.0, 0.0, 0.0};
        e[idx(t.axis)] = 1.0;
        v = {e[1] * r[2] - e[2] * r[1], e[2] * r[0] - e[0] * r[2], e[0] * r[1] - e[1] * r[0]};
        for (auto& c : v) c *= t.tau;
        for (int i = ncomp; i < 3; ++i) v[idx(i)] = 0.0;
        return v;
    }
    for (int c : bc.components) v[idx(c)] = bc.value;
    return v;
}

// Pointwise tangent: AD over the kinematic variables at one quadrature point,
// then chained through the basis operator.
template <int M>
class PointwiseKernel {
public:
    using D = Dual<M>;

    PointwiseKernel(const NonlinearSystem& sys, const QuadratureRule& rule) : sys_(sys), rule_(rule) {
        ncomp_ = sys.num_components();
        m_ = kernels::vars_per_component(ncomp_);
    }

    void run(std::size_t e, const Eigen::VectorXd& u, double load_factor, Eigen::VectorXd& r, Eigen::MatrixXd& k) const {
        const Patch& patch = sys_.patch();
        const auto& mat = sys_.problem().material;
        const auto measure = sys_.problem().measure;
        const std::size_t nloc = patch.num_local_functions();
        const auto nc = idx(ncomp_);
        const auto pairs = kernels::sym_pairs(ncomp_);
        r.setZero(static_cast<Eigen::Index>(nloc * nc));
        k.setZero(r.size(), r.size());
        std::vector<Eigen::MatrixXd> blocks(nc * nc, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nloc),
                                                                           static_cast<Eigen::Index>(nloc)));
        Eigen::MatrixXd phi(static_cast<Eigen::Index>(nloc), m_);
        Eigen::MatrixXd dmat(M, M);
        std::span<const double> us(u.data(), static_cast<std::size_t>(u.size()));
        std::span<double> rs(r.data(), static_cast<std::size_t>(r.size()));
        const double scale = patch.parametric_scale(e);

        Mat3<double> g;
        Tens3<double> h;
        Mat3<D> gd;
        Tens3<D> hd;
        auto lift = [&]() {
            gd = zero_mat3<D>();
            hd = zero_tens3<D>();
            for (int i = 0; i < ncomp_; ++i) {
                for (int J = 0; J < ncomp_; ++J) gd[i][J] = D::variable(g[i][J], i * m_ + J);
                for (std::size_t p = 0; p < pairs.size(); ++p) {
                    const int J = pairs[p][0], K = pairs[p][1];
                    const D v = D::variable(h[i][J][K], i * m_ + ncomp_ + static_cast<int>(p));
                    hd[i][J][K] = v;
                    hd[i][K][J] = v;
                }
            }
        };
        auto fill_phi = [&](const PhysicalBasis& pb) {
            for (std::size_t a = 0; a < nloc; ++a) {
                const auto ai = static_cast<Eigen::Index>(a);
                for (int J = 0; J < ncomp_; ++J) phi(ai, J) = pb.grad[a][idx(J)];
                for (std::size_t p = 0; p < pairs.size(); ++p) {
                    phi(ai, ncomp_ + static_cast<Eigen::Index>(p)) = pb.hess[a][idx(pairs[p][0])][idx(pairs[p][1])];
                }
            }
        };

        for (std::size_t q = 0; q < rule_.points.size(); ++q) {
            const PhysicalBasis pb = physical_basis(patch, e, patch.parametric_point(e, rule_.points[q]));
            const double w = rule_.weights[q] * scale * pb.map.det;
            kernels::displacement_gradients<double>(pb, ncomp_, us, g, h);
            lift();
            const auto s = stresses(compute_kinematics(gd, hd, measure, e), mat);

            StressState<double> sv;
            for (int i = 0; i < 3; ++i)
                for (int J = 0; J < 3; ++J) {
                    sv.P[i][J] = s.P[i][J].value();
                    for (int K = 0; K < 3; ++K) sv.B[i][J][K] = s.B[i][J][K].value();
                }
            kernels::add_volume_residual<double>(pb, ncomp_, sv, w, rs);

            // dmat row (i, j): derivative of the stress conjugate to variable j of component i
            for (int i = 0; i < ncomp_; ++i) {
                for (int J = 0; J < ncomp_; ++J) {
                    const auto& sd = s.P[i][J].seeds();
                    for (int c = 0; c < M; ++c) dmat(i * m_ + J, c) = sd[idx(c)];
                }
                for (std::size_t p = 0; p < pairs.size(); ++p) {
                    const int J = pairs[p][0], K = pairs[p][1];
                    const double mult = J == K ? 1.0 : 2.0;
                    const auto& sd = s.B[i][J][K].seeds();
                    for (int c = 0; c < M; ++c) dmat(i * m_ + ncomp_ + static_cast<int>(p), c) = mult * sd[idx(c)];
                }
            }
            fill_phi(pb);
            for (std::size_t i = 0; i < nc; ++i) {
                const Eigen::MatrixXd left = w * phi;
                for (std::size_t kk = 0; kk < nc; ++kk) {
                    blocks[i * nc + kk].noalias() +=
                        (left * dmat.block(static_cast<Eigen::Index>(i) * m_, static_cast<Eigen::Index>(kk) * m_, m_, m_)) *
                        phi.transpose();
                }
            }
        }

        for (const NitschePoint& np : sys_.nitsche_points(e)) {
            const PhysicalBasis pb = physical_basis(patch, e, np.xi);
            kernels::displacement_gradients<double>(pb, ncomp_, us, g, h);
            lift();
            const auto s = stresses(compute_kinematics(gd, hd, measure, e), mat);
            const auto f = kernels::nitsche_flux(s, gd, np, load_factor, ncomp_);
            const std::array<double, 3> fv{f[0].value(), f[1].value(), f[2].value()};
            kernels::add_face_residual<double>(pb, ncomp_, fv, np.normal, np.weight, rs);

            fill_phi(pb);
            Eigen::VectorXd dn(static_cast<Eigen::Index>(nloc));
            for (std::size_t a = 0; a < nloc; ++a) {
                double v = 0.0;
                for (int J = 0; J < ncomp_; ++J) v += pb.grad[a][idx(J)] * np.normal[idx(J)];
                dn(static_cast<Eigen::Index>(a)) = np.weight * v;
            }
            for (std::size_t i = 0; i < nc; ++i) {
                if (!np.active[i]) continue;
                for (std::size_t kk = 0; kk < nc; ++kk) {
                    Eigen::VectorXd c(m_);
                    for (int l = 0; l < m_; ++l) c(l) = f[i].seed(static_cast<int>(kk) * m_ + l);
                    blocks[i * nc + kk].noalias() += dn * (phi * c).transpose();
                }
            }
        }

        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t kk = 0; kk < nc; ++kk) {
                const auto& b = blocks[i * nc + kk];
                for (std::size_t a = 0; a < nloc; ++a)
                    for (std::size_t bb = 0; bb < nloc; ++bb) {
                        k(static_cast<Eigen::Index>(a * nc + i), static_cast<Eigen::Index>(bb * nc + kk)) =
                            b(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(bb));
                    }
            }
    }

private:
    const NonlinearSystem& sys_;
    const QuadratureRule& rule_;
    int ncomp_ = 3;
    int m_ = 9;
};

template <int N>
void element_ad(const NonlinearSystem& sys, const QuadratureRule& rule, std::size_t e, const Eigen::VectorXd& u,
                double load_factor, Eigen::VectorXd& r, Eigen::MatrixXd* k) {
    const auto lifted = lift<N>(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
    std::vector<Dual<N>> out(static_cast<std::size_t>(N));
    kernels::element_kernel<Dual<N>>(sys, rule, e, lifted, load_factor, out);
    r = extract_values<N>(out);
    if (k != nullptr) *k = extract_jacobian<N>(out, static_cast<std::size_t>(N));
}

using ElementAdFn = void (*)(const NonlinearSystem&, const QuadratureRule&, std::size_t, const Eigen::VectorXd&, double,
                             Eigen::VectorXd&, Eigen::MatrixXd*);

ElementAdFn element_ad_for(std::size_t n) {
    switch (n) {
        case 2: return &element_ad<2>;
        case 3: return &element_ad<3>;
        case 4: return &element_ad<4>;
        case 5: return &element_ad<5>;
        case 8: return &element_ad<8>;
        case 18: return &element_ad<18>;
        case 24: return &element_ad<24>;
        case 32: return &element_ad<32>;
        case 81: return &element_ad<81>;
        case 192: return &element_ad<192>;
        default: return nullptr;
    }
}

}  // namespace

std::string to_string(BcKind kind) {
    switch (kind) {
        case BcKind::dirichlet_u: return "dirichlet_u";
        case BcKind::dirichlet_du: return "dirichlet_du";
        case BcKind::traction: return "traction";
        case BcKind::moment: return "moment";
        case BcKind::line_traction: return "line_traction";
    }
    return "?";
}

int default_thread_count() {
    if (const char* env = std::getenv("GRADIGA_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

NonlinearSystem::NonlinearSystem(Problem problem) : problem_(std::move(problem)) {
    validate(problem_.material);
    const int ncomp = num_components();
    num_dofs_ = problem_.patch.num_functions() * idx(ncomp);
    constrained_.assign(num_dofs_, 0);
    prescribed_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_dofs_));
    external_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_dofs_));
    nitsche_.assign(problem_.patch.num_elements(), {});
    volume_rule_ = make_quadrature(problem_.patch);
    threads_ = problem_.threads > 0 ? problem_.threads : default_thread_count();
    element_dofs_.resize(problem_.patch.num_elements());
    for (std::size_t e = 0; e < element_dofs_.size(); ++e) {
        for (std::size_t a : problem_.patch.element_functions(e))
            for (int i = 0; i < ncomp; ++i) element_dofs_[e].push_back(dof(a, i));
    }
    if (problem_.tangent == TangentMode::element && element_ad_for(element_dofs_.front().size()) == nullptr) {
        throw InvalidInput("element tangent mode: no instantiation for " + std::to_string(element_dofs_.front().size()) +
                           " element dofs");
    }
    setup_boundary();
    build_pattern();
}

void NonlinearSystem::setup_boundary() {
    const Patch& patch = problem_.patch;
    const int dim = patch.dim();
    const int ncomp = num_components();
    const auto entities = enumerate_boundary(patch);
    // (selector, component) -> kinds seen, for the exclusivity rules
    std::map<std::pair<std::string, int>, std::set<BcKind>> seen;
    std::map<std::size_t, double> fixed;

    for (std::size_t b = 0; b < problem_.bcs.size(); ++b) {
        const auto& bc = problem_.bcs[b];
        const std::string key = "bcs[" + std::to_string(b) + "]";
        std::array<int, 3> pinned{};
        try {
            pinned = parse_selector(bc.selector, dim);
        } catch (const InvalidInput& ex) {
            throw ConfigError(key, ex.what());
        }
        int npinned = 0;
        for (int d = 0; d < dim; ++d) npinned += pinned[idx(d)] >= 0 ? 1 : 0;
        const bool is_face = npinned == 1;
        const bool is_edge = dim == 3 && npinned == 2;
        if (bc.components.empty() && !bc.twist) throw ConfigError(key, "no components given");
        for (int c : bc.components) {
            if (c < 0 || c >= ncomp) throw ConfigError(key, "component " + std::to_string(c + 1) + " out of range");
        }
        if (bc.kind == BcKind::line_traction && !is_edge) throw ConfigError(key, "line traction needs an edge selector");
        if ((bc.kind == BcKind::traction || bc.kind == BcKind::moment || bc.kind == BcKind::dirichlet_du) && !is_face) {
            throw ConfigError(key, to_string(bc.kind) + " needs a face selector");
        }
        if (bc.twist && bc.kind != BcKind::traction) throw ConfigError(key, "twist field is only valid for traction");
        if (bc.kind == BcKind::dirichlet_du && !(bc.penalty > 0.0)) throw ConfigError(key, "penalty must be positive");

        std::vector<int> comps = bc.components;
        if (bc.twist) {
            comps.clear();
            for (int c = 0; c < ncomp; ++c) comps.push_back(c);
        }
        for (int c : comps) {
            auto& kinds = seen[{bc.selector, c}];
            const auto clash = [&](BcKind a, BcKind bb) {
                return (bc.kind == a && kinds.count(bb)) || (bc.kind == bb && kinds.count(a));
            };
            if (clash(BcKind::dirichlet_u, BcKind::traction) || clash(BcKind::dirichlet_du, BcKind::moment)) {
                throw ConfigError(key, "conflicting boundary conditions on " + bc.selector + " component " +
                                           std::to_string(c + 1));
            }
            kinds.insert(bc.kind);
        }

        switch (bc.kind) {
            case BcKind::dirichlet_u: {
                for (std::size_t a : boundary_functions(patch, pinned)) {
                    for (int c : comps) {
                        const std::size_t d = dof(a, c);
                        const auto it = fixed.find(d);
                        if (it != fixed.end() && it->second != bc.value) {
                            throw ConfigError(key, "inconsistent prescribed values on shared dofs");
                        }
                        fixed[d] = bc.value;
                        constrained_[d] = 1;
                        prescribed_(static_cast<Eigen::Index>(d)) = bc.value;
                    }
                }
                break;
            }
            case BcKind::dirichlet_du: {
                BoundaryEntity ent;
                ent.pinned = pinned;
                for (const auto& be : boundary_quadrature(patch, ent)) {
                    for (const auto& bp : be.points) {
                        NitschePoint np;
                        np.xi = bp.xi;
                        np.weight = bp.weight;
                        np.normal = bp.normal;
                        np.element_size = bp.element_size;
                        np.penalty = bc.penalty;
                        for (int c : comps) {
                            np.active[idx(c)] = true;
                            np.target[idx(c)] = bc.value;
                        }
                        nitsche_[be.element].push_back(np);
                    }
                }
                break;
            }
            case BcKind::traction:
            case BcKind::moment:
            case BcKind::line_traction: {
                BoundaryEntity ent;
                ent.pinned = pinned;
                ent.kind = is_edge ? BoundaryEntity::Kind::edge : BoundaryEntity::Kind::face;
                for (const auto& be : boundary_quadrature(patch, ent, 1)) {
                    const auto& dofs = element_dofs_[be.element];
                    for (const auto& bp : be.points) {
                        const PhysicalBasis pb = physical_basis(patch, be.element, bp.xi);
                        const Point3 v = bc_vector(bc, pb.map.x, ncomp);
                        for (std::size_t a = 0; a < pb.size(); ++a) {
                            double shape = pb.values[a];
                            if (bc.kind == BcKind::moment) {
                                shape = 0.0;
                                for (int J = 0; J < dim; ++J) shape += pb.grad[a][idx(J)] * bp.normal[idx(J)];
                            }
                            for (int c = 0; c < ncomp; ++c) {
                                external_(static_cast<Eigen::Index>(dofs[a * idx(ncomp) + idx(c)])) +=
                                    bp.weight * shape * v[idx(c)];
                            }
                        }
                    }
                }
                break;
            }
        }
    }
}

void NonlinearSystem::build_pattern() {
    const Patch& patch = problem_.patch;
    const int p = patch.degree();
    const int ncomp = num_components();
    const auto n = static_cast<Eigen::Index>(num_dofs_);
    // Functions interact when their index ranges overlap in every direction.
    std::vector<std::vector<std::size_t>> neighbours(patch.num_functions());
    Eigen::VectorXi nnz(n);
    for (std::size_t b = 0; b < patch.num_functions(); ++b) {
        const auto ijk = patch.function_ijk(b);
        std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
        for (int d = 0; d < patch.dim(); ++d) {
            lo[idx(d)] = std::max(0, ijk[idx(d)] - p);
            hi[idx(d)] = std::min(patch.num_basis(d) - 1, ijk[idx(d)] + p);
        }
        for (int k = lo[2]; k <= hi[2]; ++k)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int i = lo[0]; i <= hi[0]; ++i) neighbours[b].push_back(patch.function_index({i, j, k}));
        for (int c = 0; c < ncomp; ++c) nnz(static_cast<Eigen::Index>(dof(b, c))) = static_cast<int>(neighbours[b].size()) * ncomp;
    }
    pattern_.resize(n, n);
    pattern_.reserve(nnz);
    for (std::size_t b = 0; b < patch.num_functions(); ++b) {
        for (int c = 0; c < ncomp; ++c) {
            const auto col = static_cast<Eigen::Index>(dof(b, c));
            for (std::size_t a : neighbours[b])
                for (int r = 0; r < ncomp; ++r) pattern_.insert(static_cast<Eigen::Index>(dof(a, r)), col) = 0.0;
        }
    }
    pattern_.makeCompressed();
}

void NonlinearSystem::apply_constraints(Eigen::VectorXd& U, double factor) const {
    for (std::size_t d = 0; d < num_dofs_; ++d) {
        if (constrained_[d]) U(static_cast<Eigen::Index>(d)) = factor * prescribed_(static_cast<Eigen::Index>(d));
    }
}

Eigen::VectorXd NonlinearSystem::gather(const Eigen::VectorXd& U, std::size_t element) const {
    const auto& dofs = element_dofs_[element];
    Eigen::VectorXd u(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i) u(static_cast<Eigen::Index>(i)) = U(static_cast<Eigen::Index>(dofs[i]));
    return u;
}

Eigen::VectorXd NonlinearSystem::element_residual(std::size_t element, const Eigen::VectorXd& local_u) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(local_u.size());
    const Patch& patch = problem_.patch;
    const int ncomp = num_components();
    std::span<const double> us(local_u.data(), static_cast<std::size_t>(local_u.size()));
    std::span<double> rs(r.data(), static_cast<std::size_t>(r.size()));
    const double scale = patch.parametric_scale(element);
    Mat3<double> g;
    Tens3<double> h;
    for (std::size_t q = 0; q < volume_rule_.points.size(); ++q) {
        const PhysicalBasis pb = physical_basis(patch, element, patch.parametric_point(element, volume_rule_.points[q]));
        kernels::displacement_gradients<double>(pb, ncomp, us, g, h);
        const auto s = stresses(compute_kinematics(g, h, problem_.measure, element), problem_.material);
        kernels::add_volume_residual<double>(pb, ncomp, s, volume_rule_.weights[q] * scale * pb.map.det, rs);
    }
    return r;
}

Eigen::VectorXd NonlinearSystem::face_residual(std::size_t element, const Eigen::VectorXd& local_u) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(local_u.size());
    const int ncomp = num_components();
    std::span<const double> us(local_u.data(), static_cast<std::size_t>(local_u.size()));
    std::span<double> rs(r.data(), static_cast<std::size_t>(r.size()));
    Mat3<double> g;
    Tens3<double> h;
    for (const NitschePoint& np : nitsche_[element]) {
        const PhysicalBasis pb = physical_basis(problem_.patch, element, np.xi);
        kernels::displacement_gradients<double>(pb, ncomp, us, g, h);
        const auto s = stresses(compute_kinematics(g, h, problem_.measure, element), problem_.material);
        kernels::add_face_residual<double>(pb, ncomp, kernels::nitsche_flux(s, g, np, 1.0, ncomp), np.normal, np.weight,
                                           rs);
    }
    return r;
}

void NonlinearSystem::element_system(std::size_t element, const Eigen::VectorXd& local_u, double load_factor,
                                     TangentMode mode, Eigen::VectorXd& r, Eigen::MatrixXd* k) const {
    if (k == nullptr) {
        r = Eigen::VectorXd::Zero(local_u.size());
        kernels::element_kernel<double>(*this, volume_rule_, element,
                                        std::span<const double>(local_u.data(), static_cast<std::size_t>(local_u.size())),
                                        load_factor, std::span<double>(r.data(), static_cast<std::size_t>(r.size())));
        return;
    }
    if (mode == TangentMode::element) {
        const auto fn = element_ad_for(static_cast<std::size_t>(local_u.size()));
        if (fn == nullptr) throw InvalidInput("element tangent mode unavailable for this element size");
        fn(*this, volume_rule_, element, local_u, load_factor, r, k);
        return;
    }
    switch (num_components()) {
        case 1: PointwiseKernel<2>(*this, volume_rule_).run(element, local_u, load_factor, r, *k); break;
        case 2: PointwiseKernel<10>(*this, volume_rule_).run(element, local_u, load_factor, r, *k); break;
        default: PointwiseKernel<27>(*this, volume_rule_).run(element, local_u, load_factor, r, *k); break;
    }
}

AssemblyResult NonlinearSystem::assemble_raw(const Eigen::VectorXd& U, double load_factor, bool with_jacobian) const {
    if (static_cast<std::size_t>(U.size()) != num_dofs_) throw InvalidInput("assemble: dof vector has wrong size");
    AssemblyResult out;
    out.residual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_dofs_));
    if (with_jacobian) {
        out.jacobian = pattern_;
        out.jacobian.coeffs().setZero();
    }
    const std::size_t ne = problem_.patch.num_elements();
    const auto nw = static_cast<std::size_t>(threads_);
    const std::size_t chunk = std::max<std::size_t>(16, 8 * nw);
    std::vector<Eigen::VectorXd> rbuf(chunk);
    std::vector<Eigen::MatrixXd> kbuf(chunk);

    for (std::size_t start = 0; start < ne; start += chunk) {
        const std::size_t count = std::min(chunk, ne - start);
        auto work = [&](std::size_t wid) {
            for (std::size_t c = wid; c < count; c += nw) {
                const std::size_t e = start + c;
                element_system(e, gather(U, e), load_factor, problem_.tangent, rbuf[c], with_jacobian ? &kbuf[c] : nullptr);
            }
        };
        if (nw <= 1 || count == 1) {
            work(0);
        } else {
            std::vector<std::exception_ptr> errors(nw);
            std::vector<std::thread> pool;
            for (std::size_t wid = 0; wid < nw; ++wid) {
                pool.emplace_back([&, wid] {
                    try {
                        work(wid);
                    } catch (...) {
                        errors[wid] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& err : errors)
                if (err) std::rethrow_exception(err);
        }
        // Serial scatter in element order keeps the sums reproducible.
        for (std::size_t c = 0; c < count; ++c) {
            const auto& dofs = element_dofs_[start + c];
            for (std::size_t i = 0; i < dofs.size(); ++i) out.residual(static_cast<Eigen::Index>(dofs[i])) += rbuf[c](static_cast<Eigen::Index>(i));
            if (!with_jacobian) continue;
            // Element dofs are ascending, so each column is merged in one pass.
            const int* outer = out.jacobian.outerIndexPtr();
            const int* inner = out.jacobian.innerIndexPtr();
            double* vals = out.jacobian.valuePtr();
            for (std::size_t j = 0; j < dofs.size(); ++j) {
                int pos = outer[dofs[j]];
                const int end = outer[dofs[j] + 1];
                for (std::size_t i = 0; i < dofs.size(); ++i) {
                    const int row = static_cast<int>(dofs[i]);
                    while (pos < end && inner[pos] < row) ++pos;
                    if (pos == end || inner[pos] != row) throw InvalidInput("assemble: entry outside sparsity pattern");
                    vals[pos] += kbuf[c](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
            }
        }
    }
    out.residual -= load_factor * external_;
    return out;
}

AssemblyResult NonlinearSystem::assemble(const Eigen::VectorXd& U, double load_factor, bool with_jacobian) const {
    AssemblyResult out = assemble_raw(U, load_factor, with_jacobian);
    for (std::size_t d = 0; d < num_dofs_; ++d) {
        if (constrained_[d]) out.residual(static_cast<Eigen::Index>(d)) = 0.0;
    }
    if (with_jacobian) {
        for (int col = 0; col < out.jacobian.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(out.jacobian, col); it; ++it) {
                if (constrained_[static_cast<std::size_t>(it.row())] || constrained_[static_cast<std::size_t>(col)]) {
                    it.valueRef() = it.row() == col ? 1.0 : 0.0;
                }
            }
        }
    }
    return out;
}

}  // namespace gradiga
