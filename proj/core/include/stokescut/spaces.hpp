#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "stokescut/cut.hpp"
#include "stokescut/mesh.hpp"

namespace stokescut {

/// Nodal map for a doubled continuous P1 space. Vertices of elements that
/// carry both sides own two nodes, one per side; nodes are numbered side 0
/// first, then side 1, and each node owns `components` consecutive dofs.
struct DofMap {
    const TriMesh *mesh = nullptr;
    int components = 1;
    int n_nodes = 0;
    std::array<std::vector<int>, 2> side_node; // vertex -> node id, -1 if absent
    std::array<int, 2> side_node_count{0, 0};

    int n_dofs() const { return components * n_nodes; }
    int node(int vertex, int side) const { return side_node[side][vertex]; }
    int dof(int vertex, int side, int component = 0) const {
        return side_node[side][vertex] * components + component;
    }
    bool has_side(int vertex, int side) const { return side_node[side][vertex] >= 0; }
};

DofMap build_pressure_space(const TriMesh &mesh, const CutClassification &cls);
DofMap build_velocity_space(const TriMesh &mesh, const CutClassification &cls);

/// Coefficients over a DofMap; evaluation picks the branch of the requested
/// side and interpolates barycentrically.
struct FieldPair {
    const DofMap *dofs = nullptr;
    Eigen::VectorXd coefficients;

    /// Value(s) at a point of Omega_{h,side}; component c of the field.
    double evaluate(const Vec2 &p, int side, int component = 0) const;
    /// Value on a known element (no search); the element must carry the side.
    double evaluate_on(int element, const Vec2 &p, int side, int component = 0) const;
    /// Constant gradient of component c on a known element.
    Vec2 gradient_on(int element, int side, int component = 0) const;
};

/// Vector c with c_j = integral of (1/mu) chi_j over the physical subdomains,
/// assembled with cut quadrature on the (velocity) mesh carrying `cls`.
Eigen::VectorXd mean_constraint_vector(const DofMap &pressure_dofs, const CutClassification &fine_cls,
                                       const RefinementMap &ref, double mu1, double mu2);

} // namespace stokescut
