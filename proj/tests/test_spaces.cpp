#include <doctest.h>

#include <set>

#include "stokescut/errors.hpp"
#include "stokescut/spaces.hpp"

using namespace stokescut;

namespace {

struct Pair {
    TriMesh coarse, fine;
    RefinementMap ref;
    CutClassification ccls, fcls;
    LevelSet phi;

    Pair(const Rect &dom, int nxc, const LevelSet &phi_)
        : coarse(build_structured_mesh(dom, nxc, nxc)), phi(phi_) {
        auto [f, r] = uniform_refine(coarse);
        fine = std::move(f);
        ref = std::move(r);
        ccls = classify(coarse, phi);
        fcls = classify(fine, phi);
    }
};

} // namespace

TEST_CASE("interface outside the domain: one dof per vertex") {
    const LevelSet phi = LevelSet::circle({5, 5}, 0.5);
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    const CutClassification cls = classify(mesh, phi);
    const DofMap dofs = build_pressure_space(mesh, cls);
    CHECK(dofs.n_dofs() == mesh.n_vertices());
    CHECK(dofs.side_node_count[0] == 0);
}

TEST_CASE("pressure dof count against a direct vertex-set enumeration") {
    const LevelSet phi = LevelSet::circle({0.5, 0.5}, 0.3);
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 8, 8);
    const CutClassification cls = classify(mesh, phi);
    const DofMap dofs = build_pressure_space(mesh, cls);

    int expected = 0;
    for (int s = 0; s < 2; ++s) {
        std::set<int> verts;
        for (int t = 0; t < mesh.n_triangles(); ++t)
            if (cls.in_K_h_i[s][t])
                for (int v : mesh.triangles[t]) verts.insert(v);
        expected += static_cast<int>(verts.size());
    }
    CHECK(dofs.n_dofs() == expected);
    CHECK(dofs.n_dofs() > mesh.n_vertices()); // cut vertices are doubled
}

TEST_CASE("cut element vertices own two dofs per side") {
    const LevelSet phi = LevelSet::vertical_line(0.31);
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    const CutClassification cls = classify(mesh, phi);
    const DofMap dofs = build_pressure_space(mesh, cls);
    for (int t : cls.K_Gamma)
        for (int v : mesh.triangles[t]) {
            CHECK(dofs.has_side(v, 0));
            CHECK(dofs.has_side(v, 1));
        }
}

TEST_CASE("field evaluation: partition of unity and linear reproduction") {
    const LevelSet phi = LevelSet::circle({0.5, 0.5}, 0.3);
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 8, 8);
    const CutClassification cls = classify(mesh, phi);
    const DofMap dofs = build_pressure_space(mesh, cls);

    FieldPair constant{&dofs, Eigen::VectorXd::Constant(dofs.n_dofs(), 3.25)};
    CHECK(constant.evaluate({0.37, 0.81}, 1) == doctest::Approx(3.25).epsilon(1e-14));

    // nodal interpolant of f(x,y) = x reproduces x, on both sides
    Eigen::VectorXd coeff(dofs.n_dofs());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        for (int s = 0; s < 2; ++s)
            if (dofs.has_side(v, s)) coeff[dofs.dof(v, s)] = mesh.vertices[v].x;
    FieldPair linear{&dofs, coeff};
    CHECK(linear.evaluate({0.5, 0.5}, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(linear.evaluate({0.9, 0.1}, 1) == doctest::Approx(0.9).epsilon(1e-14));

    CHECK_THROWS_AS(linear.evaluate({0.05, 0.05}, 0), OutOfDomainError); // outside side-0 region
}

TEST_CASE("doubled vertex evaluates per side") {
    const LevelSet phi = LevelSet::vertical_line(0.31);
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    const CutClassification cls = classify(mesh, phi);
    const DofMap dofs = build_pressure_space(mesh, cls);

    int vtx = -1;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (dofs.has_side(v, 0) && dofs.has_side(v, 1)) vtx = v;
    REQUIRE(vtx >= 0);
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(dofs.n_dofs());
    coeff[dofs.dof(vtx, 1)] = 1.0;
    FieldPair f{&dofs, coeff};
    CHECK(f.evaluate(mesh.vertices[vtx], 0) == doctest::Approx(0.0));
    CHECK(f.evaluate(mesh.vertices[vtx], 1) == doctest::Approx(1.0));
}

TEST_CASE("mean constraint vector sums to |Omega|/mu") {
    const LevelSet inside = LevelSet::circle({0.5, 0.5}, 0.3);
    Pair p({0, 0, 1, 1}, 4, inside); // Example-1 configuration, 8x8 velocity mesh
    const DofMap pdofs = build_pressure_space(p.coarse, p.ccls);
    const Eigen::VectorXd c = mean_constraint_vector(pdofs, p.fcls, p.ref, 2.0, 2.0);
    CHECK(c.sum() == doctest::Approx(0.5).epsilon(1e-12)); // |Omega|/mu with mu = 2

    // zero coefficients satisfy the constraint trivially
    CHECK(c.dot(Eigen::VectorXd::Zero(pdofs.n_dofs())) == 0.0);

    const LevelSet outside = LevelSet::circle({9, 9}, 0.5);
    Pair q({0, 0, 1, 1}, 4, outside);
    const DofMap qdofs = build_pressure_space(q.coarse, q.ccls);
    const Eigen::VectorXd cq = mean_constraint_vector(qdofs, q.fcls, q.ref, 4.0, 4.0);
    CHECK(cq.sum() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pressure space is smaller than the scalar velocity space") {
    for (double r : {0.3, 0.5}) {
        const LevelSet phi = LevelSet::circle({0.5, 0.5}, r);
        Pair p({0, 0, 1, 1}, 8, phi);
        const DofMap pd = build_pressure_space(p.coarse, p.ccls);
        const DofMap vd = build_velocity_space(p.fine, p.fcls);
        CHECK(pd.n_dofs() < vd.n_dofs() / 2);
    }
}
