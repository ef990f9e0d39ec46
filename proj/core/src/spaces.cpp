#include "stokescut/spaces.hpp"

#include "stokescut/errors.hpp"
#include "stokescut/quadrature.hpp"

namespace stokescut {

namespace {

DofMap build_space(const TriMesh &mesh, const CutClassification &cls, int components) {
    DofMap dofs;
    dofs.mesh = &mesh;
    dofs.components = components;
    int next = 0;
    for (int s = 0; s < 2; ++s) {
        dofs.side_node[s].assign(mesh.n_vertices(), -1);
        std::vector<char> active(mesh.n_vertices(), 0);
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            if (!cls.in_K_h_i[s][t]) continue;
            for (int v : mesh.triangles[t]) active[v] = 1;
        }
        const int first = next;
        for (int v = 0; v < mesh.n_vertices(); ++v)
            if (active[v]) dofs.side_node[s][v] = next++;
        dofs.side_node_count[s] = next - first;
    }
    dofs.n_nodes = next;
    return dofs;
}

} // namespace

DofMap build_pressure_space(const TriMesh &mesh, const CutClassification &cls) {
    return build_space(mesh, cls, 1);
}

DofMap build_velocity_space(const TriMesh &mesh, const CutClassification &cls) {
    return build_space(mesh, cls, 2);
}

double FieldPair::evaluate_on(int element, const Vec2 &p, int side, int component) const {
    const TriMesh &mesh = *dofs->mesh;
    const auto coords = mesh.triangle_coords(element);
    const auto lambda = barycentric(coords, p);
    double value = 0.0;
    for (int k = 0; k < 3; ++k) {
        const int d = dofs->dof(mesh.triangles[element][k], side, component);
        if (d < 0) throw OutOfDomainError("element lacks side dofs");
        value += lambda[k] * coefficients[d];
    }
    return value;
}

Vec2 FieldPair::gradient_on(int element, int side, int component) const {
    const TriMesh &mesh = *dofs->mesh;
    const auto grads = p1_gradients(mesh.triangle_coords(element));
    Vec2 g{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        const int d = dofs->dof(mesh.triangles[element][k], side, component);
        if (d < 0) throw OutOfDomainError("element lacks side dofs");
        g += grads[k] * coefficients[d];
    }
    return g;
}

double FieldPair::evaluate(const Vec2 &p, int side, int component) const {
    const TriMesh &mesh = *dofs->mesh;
    const double tol = 1e-12;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        bool has = true;
        for (int v : mesh.triangles[t])
            if (!dofs->has_side(v, side)) has = false;
        if (!has) continue;
        const auto lambda = barycentric(mesh.triangle_coords(t), p);
        if (lambda[0] >= -tol && lambda[1] >= -tol && lambda[2] >= -tol) return evaluate_on(t, p, side, component);
    }
    throw OutOfDomainError("point outside the side's mesh region");
}

Eigen::VectorXd mean_constraint_vector(const DofMap &pressure_dofs, const CutClassification &fine_cls,
                                       const RefinementMap &ref, double mu1, double mu2) {
    const TriMesh &fine = *fine_cls.mesh;
    const TriMesh &coarse = *pressure_dofs.mesh;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(pressure_dofs.n_dofs());
    const double inv_mu[2] = {1.0 / mu1, 1.0 / mu2};

    for (int t = 0; t < fine.n_triangles(); ++t) {
        const CutElement &ce = fine_cls.elements[t];
        const int parent = ref.parent_of[t];
        const auto parent_coords = coarse.triangle_coords(parent);
        for (int s = 0; s < 2; ++s) {
            QuadratureRule rule;
            if (ce.cut_case == CutCase::cut) {
                rule = subpolygon_quadrature(ce.subpolygon[s], 2);
            } else if (ce.one_side() == s) {
                rule = triangle_quadrature(fine.triangle_coords(t), 2);
            }
            if (rule.empty()) continue;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const auto lambda = barycentric(parent_coords, rule.points[q]);
                for (int k = 0; k < 3; ++k) {
                    const int d = pressure_dofs.dof(coarse.triangles[parent][k], s);
                    if (d < 0) throw OutOfDomainError("pressure side missing on a parent element");
                    c[d] += inv_mu[s] * rule.weights[q] * lambda[k];
                }
            }
        }
    }
    return c;
}

} // namespace stokescut
