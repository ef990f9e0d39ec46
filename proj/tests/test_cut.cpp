#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "stokescut/cut.hpp"
#include "stokescut/errors.hpp"
#include "stokescut/quadrature.hpp"

using namespace stokescut;

namespace {

const std::array<Vec2, 3> kUnitRight = {Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};

// Monte-Carlo per-element classifier: samples signs on a deterministic grid
int sampled_case(const TriMesh &mesh, int t, const LevelSet &phi, int n = 10000) {
    bool neg = false, pos = false;
    const auto c = mesh.triangle_coords(t);
    const int k = static_cast<int>(std::sqrt(2.0 * n));
    for (int i = 0; i <= k; ++i)
        for (int j = 0; i + j <= k; ++j) {
            const double l1 = static_cast<double>(i) / k;
            const double l2 = static_cast<double>(j) / k;
            const Vec2 p = c[0] * (1.0 - l1 - l2) + c[1] * l1 + c[2] * l2;
            const double v = phi.value(p);
            neg |= v < -1e-13;
            pos |= v > 1e-13;
        }
    return neg && pos ? 2 : (neg ? 0 : 1);
}

double side_area_sum(const CutClassification &cls) {
    double s = 0.0;
    for (int t = 0; t < cls.n_elements(); ++t) {
        const double h = cls.mesh->diameter(t);
        s += (cls.elements[t].alpha[0] + cls.elements[t].alpha[1]) * h * h;
    }
    return s;
}

} // namespace

TEST_CASE("intersect_triangle: straight cut at x = 0.25") {
    const LevelSet phi = LevelSet::vertical_line(0.25);
    const CutElement ce = intersect_triangle(kUnitRight, phi);
    REQUIRE(ce.cut_case == CutCase::cut);
    std::set<std::pair<double, double>> pts;
    for (const Vec2 &p : ce.intersections) pts.insert({p.x, p.y});
    CHECK(pts.count({0.25, 0.0}) == 1);
    CHECK(pts.count({0.25, 0.75}) == 1);

    const double h2 = 2.0; // h_K = sqrt(2)
    CHECK(ce.alpha[0] * h2 == doctest::Approx(0.21875).epsilon(1e-13));
    CHECK(ce.alpha[1] * h2 == doctest::Approx(0.28125).epsilon(1e-13));
    CHECK(ce.alpha[0] + ce.alpha[1] == doctest::Approx(0.5 / h2).epsilon(1e-13));
    CHECK(ce.segment_normal.x == doctest::Approx(1.0));
    CHECK(ce.gamma == doctest::Approx(0.75 / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("intersect_triangle: interface far away") {
    const LevelSet phi = LevelSet::vertical_line(2.0);
    const CutElement ce = intersect_triangle(kUnitRight, phi);
    CHECK(ce.cut_case == CutCase::interior_1);
    CHECK(ce.alpha[0] == doctest::Approx(0.25).epsilon(1e-14)); // |K|/h_K^2 = 0.5/2
    CHECK(ce.alpha[1] == 0.0);
}

TEST_CASE("intersect_triangle: edge on the interface") {
    const LevelSet phi = LevelSet::vertical_line(0.0);
    const CutElement ce = intersect_triangle(kUnitRight, phi);
    CHECK(ce.cut_case == CutCase::edge_aligned);
    CHECK(ce.one_side() == 1);
    CHECK(ce.segment.length() == doctest::Approx(1.0));
}

TEST_CASE("intersect_triangle: near-vertex snapping") {
    const LevelSet phi = LevelSet::vertical_line(1e-12);
    const CutElement ce = intersect_triangle(kUnitRight, phi);
    // both left-edge vertices snap onto the interface
    CHECK(ce.cut_case == CutCase::edge_aligned);
}

TEST_CASE("deep double crossing of one edge raises an assumption violation") {
    const LevelSet phi = LevelSet::circle({0.5, -0.05}, 0.45);
    CHECK_THROWS_AS(intersect_triangle(kUnitRight, phi), AssumptionViolation);
}

TEST_CASE("shallow tangency lens is absorbed") {
    const LevelSet phi = LevelSet::circle({0.5, -0.21}, 0.25);
    const CutElement ce = intersect_triangle(kUnitRight, phi);
    CHECK(ce.cut_case == CutCase::interior_2);
}

TEST_CASE("classify: circle against the sampling oracle") {
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 16, 16);
    const LevelSet phi = LevelSet::circle({0.5, 0.5}, 0.3);
    const CutClassification cls = classify(mesh, phi);
    CHECK_NOTHROW(check_classification_invariants(cls));

    int oracle_cut = 0;
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (sampled_case(mesh, t, phi, 10000) == 2) ++oracle_cut;
    CHECK(static_cast<int>(cls.K_Gamma.size()) == oracle_cut);

    CHECK(side_area_sum(cls) == doctest::Approx(1.0).epsilon(1e-12));
    // both interior regions are nonempty
    CHECK(cls.in_omega_h_i[0].end() !=
          std::find(cls.in_omega_h_i[0].begin(), cls.in_omega_h_i[0].end(), 1));
    CHECK(cls.in_omega_h_i[1].end() !=
          std::find(cls.in_omega_h_i[1].begin(), cls.in_omega_h_i[1].end(), 1));
}

TEST_CASE("classify: mesh-aligned vertical line produces only aligned chords") {
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 8, 8);
    const LevelSet phi = LevelSet::vertical_line(0.5);
    const CutClassification cls = classify(mesh, phi);
    CHECK(!cls.K_Gamma.empty());
    int owned = 0;
    for (int t : cls.K_Gamma) {
        CHECK(cls.elements[t].cut_case == CutCase::edge_aligned);
        CHECK(cls.aligned_partner[t] >= 0);
        owned += cls.owns_chord[t];
    }
    CHECK(owned * 2 == static_cast<int>(cls.K_Gamma.size()));
    // chords tile the interface segment once
    double len = 0.0;
    for (int t : cls.K_Gamma)
        if (cls.owns_chord[t]) len += cls.elements[t].segment.length();
    CHECK(len == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("classify: interface outside the domain") {
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    const LevelSet phi = LevelSet::circle({5.0, 5.0}, 0.5);
    const CutClassification cls = classify(mesh, phi);
    CHECK(cls.K_Gamma.empty());
    for (int t = 0; t < cls.n_elements(); ++t) CHECK(cls.elements[t].cut_case == CutCase::interior_2);
}

TEST_CASE("classify: unresolvable tiny drop violates the interior-neighbor assumption") {
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    // crosses edges of a few elements but encloses no full element
    const LevelSet phi = LevelSet::circle({0.5, 0.52}, 0.13);
    CHECK_THROWS_AS(classify(mesh, phi), AssumptionViolation);
}

TEST_CASE("interface chord length approaches the circle perimeter from below") {
    const LevelSet phi = LevelSet::circle({0.5, 0.5}, 0.3);
    const double perimeter = 2.0 * M_PI * 0.3;
    double prev = 0.0;
    for (int nx : {8, 16, 32}) {
        const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, nx, nx);
        const CutClassification cls = classify(mesh, phi);
        double len = 0.0;
        for (int t : cls.K_Gamma)
            if (cls.owns_chord[t]) len += cls.elements[t].segment.length();
        const double h = mesh.h_max;
        CHECK(len < perimeter + 1e-12);
        CHECK(len > perimeter * (1.0 - 3.0 * (h / 0.3) * (h / 0.3)));
        CHECK(len > prev);
        prev = len;
    }
}

TEST_CASE("randomized circles: invariants against the sampling oracle") {
    std::mt19937 rng(987654);
    std::uniform_real_distribution<double> cpos(0.45, 0.55), rad(0.2, 0.35);
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 16, 16);
    for (int trial = 0; trial < 5; ++trial) {
        const LevelSet phi = LevelSet::circle({cpos(rng), cpos(rng)}, rad(rng));
        const CutClassification cls = classify(mesh, phi);
        CHECK_NOTHROW(check_classification_invariants(cls));
        CHECK(side_area_sum(cls) == doctest::Approx(1.0).epsilon(1e-12));
        int oracle_cut = 0;
        for (int t = 0; t < mesh.n_triangles(); ++t)
            if (sampled_case(mesh, t, phi, 2500) == 2) ++oracle_cut;
        CHECK(static_cast<int>(cls.K_Gamma.size()) == oracle_cut);
    }
}

TEST_CASE("closest interior elements and c_q") {
    const TriMesh mesh = build_structured_mesh({0, 0, 1, 1}, 16, 16);
    const LevelSet phi = LevelSet::circle({0.5, 0.5}, 0.3);
    const CutClassification cls = classify(mesh, phi);
    for (int t : cls.K_Gamma)
        for (int s = 0; s < 2; ++s) {
            const FacePath &p = cls.closest_interior[s].at(t);
            const CutElement &target = cls.elements[p.target];
            CHECK(target.cut_case != CutCase::cut);
            CHECK(target.one_side() == s);
        }
    CHECK(cls.c_q >= 1.0);
    CHECK(cls.c_q < 10.0);
}

TEST_CASE("pressure and velocity ghost-penalty face sets differ") {
    // Example-1 configuration: mesh pair at nx=16
    const TriMesh coarse = build_structured_mesh({0, 0, 1, 1}, 8, 8);
    const auto [fine, ref] = uniform_refine(coarse);
    const LevelSet phi = LevelSet::circle({0.5, 0.5}, 0.3);
    const CutClassification ccls = classify(coarse, phi);
    const CutClassification fcls = classify(fine, phi);
    for (int s = 0; s < 2; ++s) CHECK(ccls.F_Gamma[s].size() != fcls.F_Gamma[s].size());
}
