#include "stokescut/verification.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "stokescut/errors.hpp"
#include "stokescut/quadrature.hpp"

namespace stokescut {

int ManufacturedCase::ny_for(int nx) const {
    const double aspect = domain.height() / domain.width();
    int ny = 2 * static_cast<int>(std::lround(nx * aspect / 2.0));
    return std::max(ny, 4);
}

namespace {

ProblemConfig example_preset_12() {
    ProblemConfig cfg;
    cfg.mu1 = cfg.mu2 = 2.0;
    cfg.A = 0.55; // (1+B)/A = 2
    cfg.B = 0.1;
    cfg.D = 0.05;
    cfg.lambda_boundary_over_hx = 15.0;
    cfg.eps_u = 1e-3;
    cfg.eps_p = 1.0;
    return cfg;
}

ProblemConfig example_preset_3() {
    ProblemConfig cfg;
    cfg.A = 0.3;
    cfg.B = 0.05;
    cfg.D = 0.05;
    cfg.E = 0.25;
    cfg.F = 0.005;
    cfg.G = 0.005;
    cfg.eps_u = 1e-3;
    cfg.eps_p = 1.0;
    return cfg;
}

} // namespace

ManufacturedCase make_case(CaseId id) {
    ManufacturedCase mc;
    mc.id = id;
    switch (id) {
    case CaseId::example1_continuous: {
        mc.name = "example1_continuous";
        mc.domain = {0.0, 0.0, 1.0, 1.0};
        mc.levelset = LevelSet::circle({0.5, 0.5}, 0.3);
        ProblemConfig cfg = example_preset_12();
        cfg.sigma = 0.0;
        auto u = [](const Vec2 &p, int) -> Vec2 {
            return {20.0 * p.x * p.y * p.y * p.y, 5.0 * std::pow(p.x, 4) - 5.0 * std::pow(p.y, 4)};
        };
        cfg.exact_velocity = u;
        cfg.exact_velocity_grad = [](const Vec2 &p, int) -> Mat2 {
            return {20.0 * p.y * p.y * p.y, 60.0 * p.x * p.y * p.y, 20.0 * p.x * p.x * p.x,
                    -20.0 * p.y * p.y * p.y};
        };
        cfg.exact_pressure = [](const Vec2 &p, int) {
            return 60.0 * p.x * p.x * p.y - 20.0 * p.y * p.y * p.y - 5.0;
        };
        cfg.dirichlet = [u](const Vec2 &p) { return u(p, 0); };
        mc.config = cfg;
        break;
    }
    case CaseId::example2_static_drop: {
        mc.name = "example2_static_drop";
        mc.domain = {0.0, 0.0, 1.0, 1.0};
        mc.levelset = LevelSet::circle({0.5, 0.5}, 0.5);
        ProblemConfig cfg = example_preset_12();
        cfg.sigma = 1.0;
        cfg.kappa_mode = ProblemConfig::KappaMode::prescribed;
        cfg.kappa_const = 2.0; // = 1/R
        cfg.exact_velocity = [](const Vec2 &, int) -> Vec2 { return {0.0, 0.0}; };
        cfg.exact_velocity_grad = [](const Vec2 &, int) -> Mat2 { return {}; };
        cfg.exact_pressure = [](const Vec2 &, int side) { return side == 0 ? 0.0 : 2.0; };
        cfg.dirichlet = [](const Vec2 &) -> Vec2 { return {0.0, 0.0}; };
        mc.config = cfg;
        break;
    }
    case CaseId::example3_couette_visc: {
        mc.name = "example3_couette_visc";
        mc.domain = {0.0, -0.4, 1.0, 0.6};
        mc.levelset = LevelSet::horizontal_line(0.0);
        ProblemConfig cfg = example_preset_3();
        cfg.mu1 = 2.0;   // y < 0
        cfg.mu2 = 200.0; // y > 0
        const double L = 1.0;
        auto u = [L](const Vec2 &p, int) -> Vec2 { return {(L - p.x * p.x) / (2.0 * L), p.x * p.y / L}; };
        cfg.exact_velocity = u;
        cfg.exact_velocity_grad = [L](const Vec2 &p, int) -> Mat2 {
            return {-p.x / L, 0.0, p.y / L, p.x / L};
        };
        cfg.exact_pressure = [L](const Vec2 &p, int side) {
            const double mu_s = side == 0 ? 2.0 : 200.0;
            return p.x * mu_s / L - (2.0 + 200.0) / 8.0;
        };
        cfg.body_force = [L](const Vec2 &, int side) -> Vec2 {
            const double mu_s = side == 0 ? 2.0 : 200.0;
            return {1.5 * mu_s / L, 0.0};
        };
        cfg.dirichlet = [u](const Vec2 &p) { return u(p, 0); };
        mc.config = cfg;
        break;
    }
    case CaseId::example3_couette_pjump: {
        mc.name = "example3_couette_pjump";
        mc.domain = {0.0, 0.0, 3.0, 1.0};
        mc.levelset = LevelSet::vertical_line(2.0);
        ProblemConfig cfg = example_preset_3();
        cfg.mu1 = cfg.mu2 = 2.0;
        const double L = 3.0, H = 1.0, mu = 2.0;
        // the prescribed normal-stress jump reuses the surface-tension slot
        cfg.sigma = 1.0;
        cfg.kappa_mode = ProblemConfig::KappaMode::prescribed;
        cfg.kappa_const = 1.0;
        auto u = [L, H, mu](const Vec2 &p, int) -> Vec2 {
            return {p.y * (H - p.y) / (2.0 * mu * L), 0.0};
        };
        cfg.exact_velocity = u;
        cfg.exact_velocity_grad = [L, H, mu](const Vec2 &p, int) -> Mat2 {
            return {0.0, (H - 2.0 * p.y) / (2.0 * mu * L), 0.0, 0.0};
        };
        cfg.exact_pressure = [L](const Vec2 &p, int side) { return -p.x / L + (side == 1 ? 1.0 : 0.0); };
        cfg.body_force = [L](const Vec2 &, int) -> Vec2 { return {-1.0 / (2.0 * L), 0.0}; };
        cfg.dirichlet = [u](const Vec2 &p) { return u(p, 0); };
        mc.config = cfg;
        break;
    }
    }
    return mc;
}

ManufacturedCase make_case_by_name(const std::string &name) {
    if (name == "1" || name == "example1_continuous") return make_case(CaseId::example1_continuous);
    if (name == "2" || name == "example2_static_drop") return make_case(CaseId::example2_static_drop);
    if (name == "3a" || name == "example3_couette_visc") return make_case(CaseId::example3_couette_visc);
    if (name == "3b" || name == "example3_couette_pjump") return make_case(CaseId::example3_couette_pjump);
    throw ConfigError("unknown case '" + name + "' (use 1, 2, 3a or 3b)");
}

std::unique_ptr<Discretization> build_discretization(const ManufacturedCase &mcase, int nx) {
    if (nx < 4 || nx % 2 != 0) throw ConfigError("nx must be even and >= 4");
    const int ny = mcase.ny_for(nx);

    auto disc = std::make_unique<Discretization>();
    disc->levelset = std::make_unique<LevelSet>(mcase.levelset);
    disc->pressure_mesh =
        std::make_unique<TriMesh>(build_structured_mesh(mcase.domain, nx / 2, ny / 2));
    auto [fine, ref] = uniform_refine(*disc->pressure_mesh);
    disc->velocity_mesh = std::make_unique<TriMesh>(std::move(fine));
    disc->refinement = std::move(ref);
    disc->pressure_cls = classify(*disc->pressure_mesh, *disc->levelset);
    disc->velocity_cls =
        classify_refined(*disc->velocity_mesh, *disc->levelset, disc->pressure_cls, disc->refinement);
    disc->pressure_space = build_pressure_space(*disc->pressure_mesh, disc->pressure_cls);
    disc->velocity_space = build_velocity_space(*disc->velocity_mesh, disc->velocity_cls);
    return disc;
}

namespace {

// quadrature rule for one side of a fine element; empty when absent
QuadratureRule side_rule(const TriMesh &mesh, const CutElement &ce, int t, int side, int degree) {
    if (ce.cut_case == CutCase::cut) return subpolygon_quadrature(ce.subpolygon[side], degree);
    if (ce.one_side() == side) return triangle_quadrature(mesh.triangle_coords(t), degree);
    return {};
}

struct ErrorAccumulator {
    double p_L2 = 0.0, u_L2 = 0.0, u_H1 = 0.0, u_inf = 0.0, p_inf = 0.0;
};

ErrorAccumulator measure_errors(const Discretization &disc, const ProblemConfig &cfg,
                                const FieldPair &u_h, const FieldPair &p_h, double shift) {
    const TriMesh &fine = *disc.velocity_mesh;
    const TriMesh &coarse = *disc.pressure_mesh;
    constexpr int kErrDegree = 8;
    ErrorAccumulator acc;

    for (int t = 0; t < fine.n_triangles(); ++t) {
        const CutElement &ce = disc.velocity_cls.elements[t];
        const int parent = disc.refinement.parent_of[t];
        for (int s = 0; s < 2; ++s) {
            const QuadratureRule rule = side_rule(fine, ce, t, s, kErrDegree);
            if (rule.empty()) continue;
            const Vec2 gx = u_h.gradient_on(t, s, 0);
            const Vec2 gy = u_h.gradient_on(t, s, 1);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2 x = rule.points[q];
                const double w = rule.weights[q];
                const Vec2 ue = cfg.exact_velocity(x, s);
                const Vec2 uh{u_h.evaluate_on(t, x, s, 0), u_h.evaluate_on(t, x, s, 1)};
                const Mat2 ge = cfg.exact_velocity_grad(x, s);
                const Mat2 gh{gx.x, gx.y, gy.x, gy.y};
                const double pe = cfg.exact_pressure(x, s);
                const double ph = p_h.evaluate_on(parent, x, s) + shift;

                acc.u_L2 += w * (ue - uh).squared_norm();
                acc.u_H1 += w * (ge - gh).squared_norm();
                acc.p_L2 += w * (pe - ph) * (pe - ph);
                acc.u_inf = std::max({acc.u_inf, std::abs(ue.x - uh.x), std::abs(ue.y - uh.y)});
                acc.p_inf = std::max(acc.p_inf, std::abs(pe - ph));
            }
        }
    }

    // dof-point errors join the max norms
    for (int v = 0; v < fine.n_vertices(); ++v)
        for (int s = 0; s < 2; ++s) {
            if (!disc.velocity_space.has_side(v, s)) continue;
            const Vec2 ue = cfg.exact_velocity(fine.vertices[v], s);
            acc.u_inf = std::max({acc.u_inf,
                                  std::abs(ue.x - u_h.coefficients[disc.velocity_space.dof(v, s, 0)]),
                                  std::abs(ue.y - u_h.coefficients[disc.velocity_space.dof(v, s, 1)])});
        }
    for (int v = 0; v < coarse.n_vertices(); ++v)
        for (int s = 0; s < 2; ++s) {
            if (!disc.pressure_space.has_side(v, s)) continue;
            const double pe = cfg.exact_pressure(coarse.vertices[v], s);
            acc.p_inf = std::max(
                acc.p_inf, std::abs(pe - (p_h.coefficients[disc.pressure_space.dof(v, s)] + shift)));
        }

    acc.u_L2 = std::sqrt(acc.u_L2);
    acc.u_H1 = std::sqrt(acc.u_H1);
    acc.p_L2 = std::sqrt(acc.p_L2);
    return acc;
}

// gauge constant c with integral of mu^{-1} (p_exact - p_h - c) = 0
double pressure_gauge_shift(const Discretization &disc, const ProblemConfig &cfg, const FieldPair &p_h) {
    const TriMesh &fine = *disc.velocity_mesh;
    const TriMesh &coarse = *disc.pressure_mesh;
    double num = 0.0, den = 0.0;
    for (int t = 0; t < fine.n_triangles(); ++t) {
        const CutElement &ce = disc.velocity_cls.elements[t];
        const int parent = disc.refinement.parent_of[t];
        for (int s = 0; s < 2; ++s) {
            const QuadratureRule rule = side_rule(fine, ce, t, s, 4);
            if (rule.empty()) continue;
            const double inv_mu = 1.0 / cfg.mu(s);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double w = rule.weights[q];
                num += w * inv_mu *
                       (cfg.exact_pressure(rule.points[q], s) - p_h.evaluate_on(parent, rule.points[q], s));
                den += w * inv_mu;
            }
        }
    }
    return num / den;
}

} // namespace

RunResult run_case_full(const ManufacturedCase &mcase, int nx, const RunOptions &opts) {
    RunResult rr;
    rr.disc = build_discretization(mcase, nx);
    const DiscretePair dp = rr.disc->pair();
    rr.system = assemble_system(dp, mcase.config);
    rr.solution = solve_direct(rr.system);

    FieldPair u_h{&rr.disc->velocity_space, rr.solution.velocity};
    FieldPair p_h{&rr.disc->pressure_space, rr.solution.pressure};
    rr.pressure_shift = pressure_gauge_shift(*rr.disc, mcase.config, p_h);

    const ErrorAccumulator acc = measure_errors(*rr.disc, mcase.config, u_h, p_h, rr.pressure_shift);
    rr.report.h_x = mesh_dx(*rr.disc->velocity_mesh);
    rr.report.err_p_L2 = acc.p_L2;
    rr.report.err_u_L2 = acc.u_L2;
    rr.report.err_u_H1 = acc.u_H1;
    rr.report.err_u_inf = acc.u_inf;
    rr.report.err_p_inf = acc.p_inf;
    if (opts.with_cond) rr.report.cond = estimate_condition_number_deflated(rr.system, opts.dense_limit);
    if (opts.with_infsup) {
        auto [Nu, Np] = build_infsup_norms(dp, mcase.config);
        rr.report.infsup = estimate_infsup(rr.system, Nu, Np);
    }
    return rr;
}

ErrorReport run_case(const ManufacturedCase &mcase, int nx, const RunOptions &opts) {
    return run_case_full(mcase, nx, opts).report;
}

double fit_rate(const std::vector<double> &hs, const std::vector<double> &errs) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(errs[i] > 0.0)) continue;
        const double x = std::log(hs[i]);
        const double y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(const ManufacturedCase &mcase, const std::vector<int> &levels,
                                   const RunOptions &opts, int jobs) {
    ConvergenceTable table;
    table.rows.resize(levels.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < levels.size(); ++i) table.rows[i] = run_case(mcase, levels[i], opts);
    } else {
        std::vector<std::future<ErrorReport>> futs;
        for (int nx : levels)
            futs.push_back(std::async(std::launch::async, [&mcase, nx, &opts] {
                return run_case(mcase, nx, opts);
            }));
        for (std::size_t i = 0; i < futs.size(); ++i) table.rows[i] = futs[i].get();
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const ErrorReport &a, const ErrorReport &b) { return a.h_x > b.h_x; });

    std::vector<double> hs;
    for (const auto &r : table.rows) hs.push_back(r.h_x);
    auto column = [&](double ErrorReport::*field) {
        std::vector<double> v;
        for (const auto &r : table.rows) v.push_back(r.*field);
        return fit_rate(hs, v);
    };
    table.rates.p_L2 = column(&ErrorReport::err_p_L2);
    table.rates.u_L2 = column(&ErrorReport::err_u_L2);
    table.rates.u_H1 = column(&ErrorReport::err_u_H1);
    table.rates.u_inf = column(&ErrorReport::err_u_inf);
    table.rates.p_inf = column(&ErrorReport::err_p_inf);
    table.rates.cond = column(&ErrorReport::cond);
    return table;
}

std::vector<SweepRow> sweep_interface_offset(const std::vector<double> &deltas,
                                             const std::vector<double> &eps_u_values, int nx,
                                             double eps_p) {
    ManufacturedCase base = make_case(CaseId::example3_couette_pjump);
    const double h_x = base.domain.width() / nx;

    std::vector<SweepRow> rows;
    for (double eps_u : eps_u_values) {
        for (double delta : deltas) {
            ManufacturedCase mc = base;
            mc.levelset = LevelSet::vertical_line(2.0 + delta * h_x);
            mc.config.eps_u = eps_u;
            mc.config.eps_p = eps_p;
            auto disc = build_discretization(mc, nx);
            const AssembledSystem sys = assemble_system(disc->pair(), mc.config);
            rows.push_back({delta, eps_u, estimate_condition_number_deflated(sys)});
        }
    }
    return rows;
}

double discrete_residual_inf(const AssembledSystem &sys, const Eigen::VectorXd &x) {
    return (sys.matrix * x - sys.rhs).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd interpolate_exact(const Discretization &disc, const ProblemConfig &cfg) {
    const int n_u = disc.velocity_space.n_dofs();
    const int n_p = disc.pressure_space.n_dofs();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_u + n_p + 1);
    const TriMesh &fine = *disc.velocity_mesh;
    for (int v = 0; v < fine.n_vertices(); ++v)
        for (int s = 0; s < 2; ++s) {
            if (!disc.velocity_space.has_side(v, s)) continue;
            const Vec2 u = cfg.exact_velocity(fine.vertices[v], s);
            x[disc.velocity_space.dof(v, s, 0)] = u.x;
            x[disc.velocity_space.dof(v, s, 1)] = u.y;
        }
    const TriMesh &coarse = *disc.pressure_mesh;
    for (int v = 0; v < coarse.n_vertices(); ++v)
        for (int s = 0; s < 2; ++s) {
            if (!disc.pressure_space.has_side(v, s)) continue;
            x[n_u + disc.pressure_space.dof(v, s)] = cfg.exact_pressure(coarse.vertices[v], s);
        }
    // gauge-match against the discrete constraint
    const Eigen::VectorXd c = mean_constraint_vector(disc.pressure_space, disc.velocity_cls,
                                                     disc.refinement, cfg.mu1, cfg.mu2);
    const double total = c.sum();
    const double mean = c.dot(x.segment(n_u, n_p)) / total;
    for (int j = 0; j < n_p; ++j) x[n_u + j] -= mean;
    return x;
}

} // namespace stokescut
