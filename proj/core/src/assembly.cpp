#include "stokescut/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stokescut/errors.hpp"
#include "stokescut/quadrature.hpp"

namespace stokescut {

namespace {
constexpr int kVolumeDegree = 4;
constexpr int kLineDegree = 5; // 3-point Gauss
} // namespace

void validate_config(const ProblemConfig &cfg, int max_N_Ki) {
    if (!(cfg.mu1 > 0.0) || !(cfg.mu2 > 0.0)) throw ConfigError("viscosities must be positive");
    if (!(cfg.eps_u >= 0.0) || !(cfg.eps_p >= 0.0)) throw ConfigError("stabilization scalings must be >= 0");
    if (!(cfg.A > 0.0 && cfg.A < 1.0)) throw ConfigError("A must lie in (0,1)");
    if (!(cfg.B > 0.0) || !(cfg.D > 0.0)) throw ConfigError("B and D must be positive");
    if (!cfg.lambda_boundary_over_hx) {
        if (!(cfg.F > 0.0) || !(cfg.G > 0.0)) throw ConfigError("F and G must be positive");
        const double bound = (1.0 - cfg.A) / (1.0 + max_N_Ki);
        if (!(cfg.E > 0.0 && cfg.E < bound))
            throw ConfigError("E outside (0, (1-A)/(1+max N_Ki)) = (0, " + std::to_string(bound) + ")");
    }
}

NitscheWeights compute_nitsche_weights(const CutElement &ce, double mu1, double mu2) {
    const double a1 = ce.alpha[0], a2 = ce.alpha[1];
    const double denom = mu1 * a2 + mu2 * a1;
    if (denom <= 0.0) throw Error("degenerate cut: both side fractions vanish");
    return {mu2 * a1 / denom, mu1 * a2 / denom};
}

NitscheWeights compute_nitsche_weights_aligned(double alpha_T, double gamma_T, double alpha_K,
                                               double gamma_K, double mu1, double mu2) {
    const double rTK = (gamma_T / gamma_K) * (gamma_T / gamma_K);
    const double rKT = (gamma_K / gamma_T) * (gamma_K / gamma_T);
    NitscheWeights w;
    w.kappa1 = mu2 * alpha_T / (mu1 * alpha_K * rTK + mu2 * alpha_T);
    w.kappa2 = mu1 * alpha_K / (mu1 * alpha_K + mu2 * alpha_T * rKT);
    return w;
}

double compute_lambda_gamma(const CutElement &ce, const CutElement *partner, double h_K,
                            const ProblemConfig &cfg) {
    const double mu1 = cfg.mu1, mu2 = cfg.mu2;
    if (ce.cut_case == CutCase::cut) {
        const NitscheWeights w = compute_nitsche_weights(ce, mu1, mu2);
        const double mu_avg = w.kappa1 * mu1 + w.kappa2 * mu2;
        const double eta = cfg.D * mu_avg +
                           (1.0 + cfg.B) * ce.gamma * mu1 * mu2 /
                               (cfg.A * (mu1 * ce.alpha[1] + mu2 * ce.alpha[0]));
        return eta / h_K;
    }
    if (ce.cut_case == CutCase::edge_aligned && partner != nullptr) {
        const CutElement &T = ce.one_side() == 0 ? ce : *partner;
        const CutElement &K = ce.one_side() == 0 ? *partner : ce;
        const double alpha_T = T.alpha[0], gamma_T = T.gamma;
        const double alpha_K = K.alpha[1], gamma_K = K.gamma;
        const NitscheWeights w = compute_nitsche_weights_aligned(alpha_T, gamma_T, alpha_K, gamma_K, mu1, mu2);
        const double mu_avg = w.kappa1 * mu1 + w.kappa2 * mu2;
        const double eta = cfg.D * gamma_K * mu_avg +
                           (1.0 + cfg.B) * mu1 * mu2 /
                               (cfg.A * (mu1 * alpha_K / (gamma_K * gamma_K) +
                                         mu2 * alpha_T / (gamma_T * gamma_T)));
        return eta / ce.segment.length();
    }
    throw Error("lambda_Gamma requested for a non-interface element");
}

double compute_lambda_boundary(const CutElement &ce, int side, const CutClassification &cls,
                               double h_K, const ProblemConfig &cfg) {
    const double mu_s = side == 0 ? cfg.mu1 : cfg.mu2;
    const double alpha_full = ce.alpha[0] + ce.alpha[1]; // |K| / h_K^2
    const double gb = ce.gamma_boundary;
    if (ce.cut_case == CutCase::cut) {
        return (cfg.G * mu_s + 2.0 * (1.0 + cfg.F) * cls.c_q * mu_s * gb / (cfg.E * alpha_full)) / h_K;
    }
    return (cfg.G * mu_s + (1.0 + cfg.F) * mu_s * gb / (cfg.E * alpha_full)) / h_K;
}

double mesh_dx(const TriMesh &mesh) {
    double dx = mesh.h_max;
    for (const Face &f : mesh.faces) {
        const Vec2 d = mesh.vertices[f.v1] - mesh.vertices[f.v0];
        if (std::abs(d.y) < 1e-14 * mesh.h_max) dx = std::min(dx, std::abs(d.x));
    }
    return dx;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Sym2 basis_strain(const Vec2 &grad, int comp) {
    if (comp == 0) return {grad.x, 0.0, 0.5 * grad.y};
    return {0.0, grad.y, 0.5 * grad.x};
}

struct VelocityBranch {
    int element = -1;
    std::array<Vec2, 3> coords{};
    std::array<Vec2, 3> grads{};
    std::array<int, 3> node_dof{}; // component-0 dof per vertex
    Sym2 strain(int k, int c) const { return basis_strain(grads[k], c); }
};

VelocityBranch make_branch(const TriMesh &mesh, const DofMap &vdofs, int element, int side) {
    VelocityBranch b;
    b.element = element;
    b.coords = mesh.triangle_coords(element);
    b.grads = p1_gradients(b.coords);
    for (int k = 0; k < 3; ++k) b.node_dof[k] = vdofs.dof(mesh.triangles[element][k], side, 0);
    return b;
}

struct PressureBranch {
    int parent = -1;
    std::array<Vec2, 3> coords{};
    std::array<int, 3> dofs{};
};

PressureBranch make_pressure_branch(const TriMesh &coarse, const DofMap &pdofs, int parent, int side) {
    PressureBranch b;
    b.parent = parent;
    b.coords = coarse.triangle_coords(parent);
    for (int k = 0; k < 3; ++k) {
        b.dofs[k] = pdofs.dof(coarse.triangles[parent][k], side, 0);
        if (b.dofs[k] < 0) throw Error("pressure side missing on a parent element; classifications inconsistent");
    }
    return b;
}

struct Assembler {
    const DiscretePair &dp;
    const ProblemConfig &cfg;
    const TriMesh &fine;
    const TriMesh &coarse;
    const CutClassification &vcls;
    const LevelSet &phi;
    int n_u = 0, n_p = 0;

    Triplets a_uu;    // velocity-velocity
    Triplets b_pu;    // pressure-test x velocity-trial, b_h(w,q)
    Eigen::VectorXd rhs_u, rhs_p;

    Assembler(const DiscretePair &dp_, const ProblemConfig &cfg_)
        : dp(dp_), cfg(cfg_), fine(*dp_.velocity_mesh), coarse(*dp_.pressure_mesh),
          vcls(*dp_.velocity_cls), phi(*vcls.phi) {
        n_u = dp.velocity_space->n_dofs();
        n_p = dp.pressure_space->n_dofs();
        rhs_u = Eigen::VectorXd::Zero(n_u);
        rhs_p = Eigen::VectorXd::Zero(n_p);
    }

    void add_a(int i, int j, double v) { a_uu.emplace_back(i, j, v); }
    void add_b(int ip, int ju, double v) { b_pu.emplace_back(ip, ju, v); }

    void volume_terms() {
        const bool grad_form = cfg.b_form == ProblemConfig::BForm::gradient;
        for (int t = 0; t < fine.n_triangles(); ++t) {
            const CutElement &ce = vcls.elements[t];
            const int parent = dp.refinement->parent_of[t];
            const auto coords = fine.triangle_coords(t);
            const auto grads = p1_gradients(coords);
            for (int s = 0; s < 2; ++s) {
                QuadratureRule rule;
                if (ce.cut_case == CutCase::cut)
                    rule = subpolygon_quadrature(ce.subpolygon[s], kVolumeDegree);
                else if (ce.one_side() == s)
                    rule = triangle_quadrature(coords, kVolumeDegree);
                if (rule.empty()) continue;

                const double mu_s = cfg.mu(s);
                const double measure = rule.total_weight();
                std::array<int, 3> vdof;
                for (int k = 0; k < 3; ++k) vdof[k] = dp.velocity_space->dof(fine.triangles[t][k], s, 0);
                const PressureBranch pb = make_pressure_branch(coarse, *dp.pressure_space, parent, s);

                // viscous block: constant strains, exact with the measure
                for (int k = 0; k < 3; ++k)
                    for (int c = 0; c < 2; ++c) {
                        const Sym2 eki = basis_strain(grads[k], c);
                        for (int l = 0; l < 3; ++l)
                            for (int d = 0; d < 2; ++d) {
                                const Sym2 elj = basis_strain(grads[l], d);
                                add_a(vdof[k] + c, vdof[l] + d, mu_s * measure * eki.contract(elj));
                            }
                    }

                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const Vec2 x = rule.points[q];
                    const double w = rule.weights[q];
                    const auto lam = barycentric(coords, x);
                    const auto plam = barycentric(pb.coords, x);
                    const auto pgrads = p1_gradients(pb.coords);
                    for (int l = 0; l < 3; ++l) {
                        for (int k = 0; k < 3; ++k)
                            for (int c = 0; c < 2; ++c) {
                                double val;
                                if (grad_form) {
                                    // -(w, grad q)
                                    const double gc = c == 0 ? pgrads[l].x : pgrads[l].y;
                                    val = -w * lam[k] * gc;
                                } else {
                                    // (div w, q)
                                    const double dc = c == 0 ? grads[k].x : grads[k].y;
                                    val = w * dc * plam[l];
                                }
                                add_b(pb.dofs[l], vdof[k] + c, val);
                            }
                    }
                    if (cfg.body_force) {
                        const Vec2 f = cfg.body_force(x, s);
                        for (int k = 0; k < 3; ++k) {
                            rhs_u[vdof[k] + 0] += w * lam[k] * f.x;
                            rhs_u[vdof[k] + 1] += w * lam[k] * f.y;
                        }
                    }
                }
            }
        }
    }

    void interface_terms() {
        const bool grad_form = cfg.b_form == ProblemConfig::BForm::gradient;
        for (int t = 0; t < fine.n_triangles(); ++t) {
            if (!vcls.owns_chord[t]) continue;
            const CutElement &ce = vcls.elements[t];
            const double h_K = fine.diameter(t);

            NitscheWeights kw;
            double lambda = 0.0;
            VelocityBranch vb[2];
            PressureBranch pb[2];
            if (ce.cut_case == CutCase::cut) {
                kw = compute_nitsche_weights(ce, cfg.mu1, cfg.mu2);
                lambda = compute_lambda_gamma(ce, nullptr, h_K, cfg);
                for (int s = 0; s < 2; ++s) {
                    vb[s] = make_branch(fine, *dp.velocity_space, t, s);
                    pb[s] = make_pressure_branch(coarse, *dp.pressure_space, dp.refinement->parent_of[t], s);
                }
            } else {
                const int partner = vcls.aligned_partner[t];
                const CutElement &pe = vcls.elements[partner];
                const int tT = ce.one_side() == 0 ? t : partner;
                const int tK = ce.one_side() == 0 ? partner : t;
                const CutElement &T = vcls.elements[tT];
                const CutElement &K = vcls.elements[tK];
                kw = compute_nitsche_weights_aligned(T.alpha[0], T.gamma, K.alpha[1], K.gamma, cfg.mu1,
                                                     cfg.mu2);
                lambda = compute_lambda_gamma(ce, &pe, h_K, cfg);
                vb[0] = make_branch(fine, *dp.velocity_space, tT, 0);
                vb[1] = make_branch(fine, *dp.velocity_space, tK, 1);
                pb[0] = make_pressure_branch(coarse, *dp.pressure_space, dp.refinement->parent_of[tT], 0);
                pb[1] = make_pressure_branch(coarse, *dp.pressure_space, dp.refinement->parent_of[tK], 1);
            }
            const double kappa[2] = {kw.kappa1, kw.kappa2};
            const double skew[2] = {kw.kappa2, kw.kappa1};
            const double mu[2] = {cfg.mu1, cfg.mu2};

            const QuadratureRule rule = interface_quadrature(ce.segment, kLineDegree);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2 x = rule.points[q];
                const double w = rule.weights[q];
                const Vec2 n = phi.normal(x);

                // local velocity dof data: (branch s, vertex k, component c)
                double jump_sign[2] = {1.0, -1.0};
                std::array<std::array<double, 3>, 2> lam;
                for (int s = 0; s < 2; ++s) lam[s] = barycentric(vb[s].coords, x);

                auto for_each_vdof = [&](auto &&fn) {
                    for (int s = 0; s < 2; ++s)
                        for (int k = 0; k < 3; ++k)
                            for (int c = 0; c < 2; ++c) {
                                const Vec2 value = c == 0 ? Vec2{lam[s][k], 0.0} : Vec2{0.0, lam[s][k]};
                                const Vec2 flux = vb[s].strain(k, c).apply(n) * (kappa[s] * mu[s]);
                                fn(vb[s].node_dof[k] + c, s, value, flux);
                            }
                };

                // a_h interface: -({n.mu eps(w)},[v]) - ([w],{n.mu eps(v)}) + lambda([w],[v])
                for_each_vdof([&](int i, int si, const Vec2 &vi, const Vec2 &fi) {
                    for_each_vdof([&](int j, int sj, const Vec2 &vj, const Vec2 &fj) {
                        const Vec2 jump_i = vi * jump_sign[si];
                        const Vec2 jump_j = vj * jump_sign[sj];
                        double val = -fj.dot(jump_i) - fi.dot(jump_j) + lambda * jump_i.dot(jump_j);
                        add_a(i, j, w * val);
                    });
                    // surface tension load (sigma kappa, <v.n>)
                    const double sk = cfg.sigma * (cfg.kappa_mode == ProblemConfig::KappaMode::prescribed
                                                       ? cfg.kappa_const
                                                       : phi.curvature(x));
                    rhs_u[i] += w * sk * skew[si] * vi.dot(n);
                });

                // b_h interface: gradient form +([q],<w.n>); divergence form -([n.w],{q})
                for (int sp = 0; sp < 2; ++sp) {
                    const auto plam = barycentric(pb[sp].coords, x);
                    for (int l = 0; l < 3; ++l) {
                        const double qv = plam[l];
                        for_each_vdof([&](int j, int sj, const Vec2 &vj, const Vec2 &) {
                            double val;
                            if (grad_form)
                                val = jump_sign[sp] * qv * skew[sj] * vj.dot(n);
                            else
                                val = -jump_sign[sj] * vj.dot(n) * kappa[sp] * qv;
                            add_b(pb[sp].dofs[l], j, w * val);
                        });
                    }
                }
            }
        }
    }

    void boundary_terms() {
        const bool div_form = cfg.b_form == ProblemConfig::BForm::divergence;
        const double lambda_fixed =
            cfg.lambda_boundary_over_hx ? *cfg.lambda_boundary_over_hx / mesh_dx(fine) : -1.0;
        for (int f = 0; f < fine.n_faces(); ++f) {
            const Face &face = fine.faces[f];
            if (!face.on_boundary) continue;
            const int t = face.tri0;
            const CutElement &ce = vcls.elements[t];
            const double h_K = fine.diameter(t);
            const Segment seg{fine.vertices[face.v0], fine.vertices[face.v1]};
            Vec2 n = (seg.b - seg.a).perp().normalized();
            if (n.dot(seg.midpoint() - fine.centroid(t)) < 0.0) n = n * (-1.0);

            auto rules = boundary_quadrature(seg, phi, kLineDegree);
            for (int s = 0; s < 2; ++s) {
                const QuadratureRule &rule = s == 0 ? rules.first : rules.second;
                if (rule.empty()) continue;
                const double mu_s = cfg.mu(s);
                const double lambda =
                    lambda_fixed > 0.0 ? lambda_fixed : compute_lambda_boundary(ce, s, vcls, h_K, cfg);
                const VelocityBranch vb = make_branch(fine, *dp.velocity_space, t, s);
                const PressureBranch pb =
                    make_pressure_branch(coarse, *dp.pressure_space, dp.refinement->parent_of[t], s);

                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const Vec2 x = rule.points[q];
                    const double w = rule.weights[q];
                    const auto lam = barycentric(vb.coords, x);
                    const auto plam = barycentric(pb.coords, x);
                    const Vec2 g = cfg.dirichlet ? cfg.dirichlet(x) : Vec2{0.0, 0.0};

                    for (int k = 0; k < 3; ++k)
                        for (int c = 0; c < 2; ++c) {
                            const int i = vb.node_dof[k] + c;
                            const Vec2 vi = c == 0 ? Vec2{lam[k], 0.0} : Vec2{0.0, lam[k]};
                            const Vec2 fi = vb.strain(k, c).apply(n) * mu_s;
                            for (int l = 0; l < 3; ++l)
                                for (int d = 0; d < 2; ++d) {
                                    const int j = vb.node_dof[l] + d;
                                    const Vec2 vj = d == 0 ? Vec2{lam[l], 0.0} : Vec2{0.0, lam[l]};
                                    const Vec2 fj = vb.strain(l, d).apply(n) * mu_s;
                                    add_a(i, j, w * (-fi.dot(vj) - vi.dot(fj) + lambda * vi.dot(vj)));
                                }
                            if (cfg.dirichlet) rhs_u[i] += w * (lambda * g.dot(vi) - g.dot(fi));
                            if (div_form)
                                for (int l = 0; l < 3; ++l)
                                    add_b(pb.dofs[l], i, -w * vi.dot(n) * plam[l]);
                        }
                    if (cfg.dirichlet)
                        for (int l = 0; l < 3; ++l) rhs_p[pb.dofs[l]] -= w * g.dot(n) * plam[l];
                }
            }
        }
    }
};

} // namespace

SparseMat assemble_ghost_penalty(const DofMap &dofs, const CutClassification &cls, double mu1,
                                 double mu2, GhostField which) {
    const TriMesh &mesh = *cls.mesh;
    const double h = mesh.h_max;
    const int components = dofs.components;
    Triplets trip;
    for (int s = 0; s < 2; ++s) {
        const double mu_s = s == 0 ? mu1 : mu2;
        for (int f : cls.F_Gamma[s]) {
            const Face &face = cls.mesh->faces[f];
            const double len = mesh.face_length(f);
            const Vec2 nf = (mesh.vertices[face.v1] - mesh.vertices[face.v0]).perp().normalized();

            double weight;
            if (which == GhostField::pressure) {
                weight = h * h * h / mu_s;
            } else {
                const int s_exp = cls.face_s_one[s][f] ? 1 : 3;
                weight = mu_s * std::pow(h, s_exp);
            }

            // normal-gradient jump of each nodal basis across the face
            std::vector<int> verts;
            std::vector<double> jump;
            auto add_elem = [&](int t, double sign) {
                const auto grads = p1_gradients(mesh.triangle_coords(t));
                for (int k = 0; k < 3; ++k) {
                    const int v = mesh.triangles[t][k];
                    const double j = sign * nf.dot(grads[k]);
                    auto it = std::find(verts.begin(), verts.end(), v);
                    if (it == verts.end()) {
                        verts.push_back(v);
                        jump.push_back(j);
                    } else {
                        jump[it - verts.begin()] += j;
                    }
                }
            };
            add_elem(face.tri0, 1.0);
            add_elem(face.tri1, -1.0);

            for (std::size_t a = 0; a < verts.size(); ++a)
                for (std::size_t b = 0; b < verts.size(); ++b) {
                    const double val = weight * len * jump[a] * jump[b];
                    if (val == 0.0) continue;
                    for (int c = 0; c < components; ++c)
                        trip.emplace_back(dofs.dof(verts[a], s, c), dofs.dof(verts[b], s, c), val);
                }
        }
    }
    SparseMat J(dofs.n_dofs(), dofs.n_dofs());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

AssembledSystem assemble_system(const DiscretePair &dp, const ProblemConfig &cfg) {
    validate_config(cfg, dp.velocity_cls->max_N_Ki);

    Assembler as(dp, cfg);
    as.volume_terms();
    as.interface_terms();
    as.boundary_terms();

    const int n_u = as.n_u, n_p = as.n_p;
    const int n = n_u + n_p + 1;

    const SparseMat Ju =
        assemble_ghost_penalty(*dp.velocity_space, *dp.velocity_cls, cfg.mu1, cfg.mu2, GhostField::velocity);
    const SparseMat Jp =
        assemble_ghost_penalty(*dp.pressure_space, *dp.pressure_cls, cfg.mu1, cfg.mu2, GhostField::pressure);

    const Eigen::VectorXd c = mean_constraint_vector(*dp.pressure_space, *dp.velocity_cls,
                                                     *dp.refinement, cfg.mu1, cfg.mu2);

    Triplets trip;
    trip.reserve(as.a_uu.size() + 2 * as.b_pu.size() + Ju.nonZeros() + Jp.nonZeros() + 2 * n_p);
    for (const auto &t : as.a_uu) trip.emplace_back(t.row(), t.col(), t.value());
    for (const auto &t : as.b_pu) {
        trip.emplace_back(n_u + t.row(), t.col(), t.value());  // +b_h(w,q)
        trip.emplace_back(t.col(), n_u + t.row(), -t.value()); // -b_h(v,r)
    }
    for (int k = 0; k < Ju.outerSize(); ++k)
        for (SparseMat::InnerIterator it(Ju, k); it; ++it)
            trip.emplace_back(it.row(), it.col(), cfg.eps_u * it.value());
    for (int k = 0; k < Jp.outerSize(); ++k)
        for (SparseMat::InnerIterator it(Jp, k); it; ++it)
            trip.emplace_back(n_u + it.row(), n_u + it.col(), cfg.eps_p * it.value());
    for (int j = 0; j < n_p; ++j) {
        if (c[j] == 0.0) continue;
        trip.emplace_back(n_u + j, n - 1, c[j]);
        trip.emplace_back(n - 1, n_u + j, c[j]);
    }

    AssembledSystem sys;
    sys.blocks = {n_u, n_p};
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.rhs = Eigen::VectorXd::Zero(n);
    sys.rhs.head(n_u) = as.rhs_u;
    sys.rhs.segment(n_u, n_p) = as.rhs_p;
    sys.constraint = c;
    return sys;
}

std::pair<SparseMat, SparseMat> build_infsup_norms(const DiscretePair &dp, const ProblemConfig &cfg) {
    const TriMesh &fine = *dp.velocity_mesh;
    const TriMesh &coarse = *dp.pressure_mesh;
    const CutClassification &vcls = *dp.velocity_cls;
    const LevelSet &phi = *vcls.phi;
    const DofMap &vdofs = *dp.velocity_space;
    const DofMap &pdofs = *dp.pressure_space;
    const double mu[2] = {cfg.mu1, cfg.mu2};

    Triplets tu, tp;

    // velocity: viscous energy over the physical subdomains
    for (int t = 0; t < fine.n_triangles(); ++t) {
        const CutElement &ce = vcls.elements[t];
        const auto coords = fine.triangle_coords(t);
        const auto grads = p1_gradients(coords);
        for (int s = 0; s < 2; ++s) {
            double measure = 0.0;
            if (ce.cut_case == CutCase::cut)
                measure = polygon_area(ce.subpolygon[s]);
            else if (ce.one_side() == s)
                measure = fine.area(t);
            if (measure <= 0.0) continue;
            std::array<int, 3> vdof;
            for (int k = 0; k < 3; ++k) vdof[k] = vdofs.dof(fine.triangles[t][k], s, 0);
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 2; ++c) {
                    const Sym2 eki = basis_strain(grads[k], c);
                    for (int l = 0; l < 3; ++l)
                        for (int d = 0; d < 2; ++d)
                            tu.emplace_back(vdof[k] + c, vdof[l] + d,
                                            mu[s] * measure * eki.contract(basis_strain(grads[l], d)));
                }
        }
    }

    // velocity: interface trace terms on owned chords
    for (int t = 0; t < fine.n_triangles(); ++t) {
        if (!vcls.owns_chord[t]) continue;
        const CutElement &ce = vcls.elements[t];
        const double h_K = fine.diameter(t);
        NitscheWeights kw;
        VelocityBranch vb[2];
        if (ce.cut_case == CutCase::cut) {
            kw = compute_nitsche_weights(ce, cfg.mu1, cfg.mu2);
            for (int s = 0; s < 2; ++s) vb[s] = make_branch(fine, vdofs, t, s);
        } else {
            const int partner = vcls.aligned_partner[t];
            const int tT = ce.one_side() == 0 ? t : partner;
            const int tK = ce.one_side() == 0 ? partner : t;
            const CutElement &T = vcls.elements[tT];
            const CutElement &K = vcls.elements[tK];
            kw = compute_nitsche_weights_aligned(T.alpha[0], T.gamma, K.alpha[1], K.gamma, cfg.mu1,
                                                 cfg.mu2);
            vb[0] = make_branch(fine, vdofs, tT, 0);
            vb[1] = make_branch(fine, vdofs, tK, 1);
        }
        const double kappa[2] = {kw.kappa1, kw.kappa2};
        const double mu_avg = kw.kappa1 * cfg.mu1 + kw.kappa2 * cfg.mu2;
        const double jump_sign[2] = {1.0, -1.0};

        const QuadratureRule rule = interface_quadrature(ce.segment, kLineDegree);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.points[q];
            const double w = rule.weights[q];
            const Vec2 n = phi.normal(x);
            std::array<std::array<double, 3>, 2> lam;
            for (int s = 0; s < 2; ++s) lam[s] = barycentric(vb[s].coords, x);
            auto for_each_vdof = [&](auto &&fn) {
                for (int s = 0; s < 2; ++s)
                    for (int k = 0; k < 3; ++k)
                        for (int c = 0; c < 2; ++c) {
                            const Vec2 value = c == 0 ? Vec2{lam[s][k], 0.0} : Vec2{0.0, lam[s][k]};
                            const Vec2 flux = vb[s].strain(k, c).apply(n) * (kappa[s] * mu[s]);
                            fn(vb[s].node_dof[k] + c, s, value, flux);
                        }
            };
            for_each_vdof([&](int i, int si, const Vec2 &vi, const Vec2 &fi) {
                for_each_vdof([&](int j, int sj, const Vec2 &vj, const Vec2 &fj) {
                    double val = h_K / mu_avg * fi.dot(fj);
                    val += mu_avg / h_K * jump_sign[si] * jump_sign[sj] * vi.dot(vj);
                    tu.emplace_back(i, j, w * val);
                });
            });
        }
    }

    // velocity: boundary trace terms
    for (int f = 0; f < fine.n_faces(); ++f) {
        const Face &face = fine.faces[f];
        if (!face.on_boundary) continue;
        const int t = face.tri0;
        const double h_K = fine.diameter(t);
        const Segment seg{fine.vertices[face.v0], fine.vertices[face.v1]};
        Vec2 n = (seg.b - seg.a).perp().normalized();
        if (n.dot(seg.midpoint() - fine.centroid(t)) < 0.0) n = n * (-1.0);
        auto rules = boundary_quadrature(seg, phi, kLineDegree);
        for (int s = 0; s < 2; ++s) {
            const QuadratureRule &rule = s == 0 ? rules.first : rules.second;
            if (rule.empty()) continue;
            const VelocityBranch vb = make_branch(fine, vdofs, t, s);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2 x = rule.points[q];
                const double w = rule.weights[q];
                const auto lam = barycentric(vb.coords, x);
                for (int k = 0; k < 3; ++k)
                    for (int c = 0; c < 2; ++c) {
                        const int i = vb.node_dof[k] + c;
                        const Vec2 vi = c == 0 ? Vec2{lam[k], 0.0} : Vec2{0.0, lam[k]};
                        const Vec2 fi = vb.strain(k, c).apply(n);
                        for (int l = 0; l < 3; ++l)
                            for (int d = 0; d < 2; ++d) {
                                const int j = vb.node_dof[l] + d;
                                const Vec2 vj = d == 0 ? Vec2{lam[l], 0.0} : Vec2{0.0, lam[l]};
                                const Vec2 fj = vb.strain(l, d).apply(n);
                                double val = h_K * mu[s] * fi.dot(fj);
                                val += mu[s] / h_K * vi.dot(vj);
                                tu.emplace_back(i, j, w * val);
                            }
                    }
            }
        }
    }

    // pressure: mu^{-1}-weighted mass over the full extended meshes
    for (int t = 0; t < coarse.n_triangles(); ++t) {
        const auto coords = coarse.triangle_coords(t);
        const QuadratureRule rule = triangle_quadrature(coords, 2);
        for (int s = 0; s < 2; ++s) {
            if (!dp.pressure_cls->in_K_h_i[s][t]) continue;
            std::array<int, 3> pdof;
            for (int k = 0; k < 3; ++k) pdof[k] = pdofs.dof(coarse.triangles[t][k], s, 0);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const auto lam = barycentric(coords, rule.points[q]);
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l)
                        tp.emplace_back(pdof[k], pdof[l], rule.weights[q] / mu[s] * lam[k] * lam[l]);
            }
        }
    }

    SparseMat Nu(vdofs.n_dofs(), vdofs.n_dofs());
    Nu.setFromTriplets(tu.begin(), tu.end());
    Nu += assemble_ghost_penalty(vdofs, vcls, cfg.mu1, cfg.mu2, GhostField::velocity);
    SparseMat Np(pdofs.n_dofs(), pdofs.n_dofs());
    Np.setFromTriplets(tp.begin(), tp.end());
    Np += assemble_ghost_penalty(pdofs, *dp.pressure_cls, cfg.mu1, cfg.mu2, GhostField::pressure);
    return {std::move(Nu), std::move(Np)};
}

} // namespace stokescut
