#include <doctest.h>

#include <queue>
#include <random>

#include "stokescut/errors.hpp"
#include "stokescut/mesh.hpp"

using namespace stokescut;

namespace {

double total_area(const TriMesh &m) {
    double a = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) a += m.area(t);
    return a;
}

// independent oracle: per-source BFS distances over the element adjacency graph
std::vector<int> bfs_distances(const TriMesh &m, int start) {
    std::vector<int> dist(m.n_triangles(), -1);
    std::queue<int> q;
    dist[start] = 0;
    q.push(start);
    while (!q.empty()) {
        const int t = q.front();
        q.pop();
        for (int f : m.triangle_faces[t]) {
            if (m.faces[f].on_boundary) continue;
            const int n = m.neighbor_across(t, f);
            if (dist[n] == -1) {
                dist[n] = dist[t] + 1;
                q.push(n);
            }
        }
    }
    return dist;
}

} // namespace

TEST_CASE("structured mesh counts on the 4x4 unit square") {
    const TriMesh m = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    CHECK(m.n_triangles() == 32);
    CHECK(m.n_vertices() == 25);
    CHECK(m.n_faces() == 56);
    int boundary = 0;
    for (const Face &f : m.faces) boundary += f.on_boundary;
    CHECK(boundary == 16);
    CHECK(m.h_max == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));
    CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(check_mesh_invariants(m));
}

TEST_CASE("generator rejects degenerate input") {
    CHECK_THROWS_AS(build_structured_mesh({0, 0, 0, 1}, 4, 4), InvalidDomainError);
    CHECK_THROWS_AS(build_structured_mesh({0, 0, 1, 1}, 1, 4), InvalidDomainError);
    CHECK_THROWS_AS(build_structured_mesh({0, 0, 1, 1}, 4, 1), InvalidDomainError);
}

TEST_CASE("mesh invariants hold for stretched rectangles") {
    const TriMesh m = build_structured_mesh({0, -0.4, 1, 0.6}, 6, 10);
    CHECK_NOTHROW(check_mesh_invariants(m));
    CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform refinement") {
    const TriMesh coarse = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    const auto [fine, map] = uniform_refine(coarse);
    CHECK(fine.n_triangles() == 128);
    CHECK(fine.n_vertices() == 81); // (2*4+1)^2 grid
    CHECK(fine.h_max == doctest::Approx(coarse.h_max / 2.0).epsilon(1e-14));
    CHECK_NOTHROW(check_mesh_invariants(fine));

    for (int t = 0; t < coarse.n_triangles(); ++t) {
        double child_area = 0.0;
        for (int c : map.children_of[t]) {
            CHECK(map.parent_of[c] == t);
            CHECK(fine.area(c) == doctest::Approx(coarse.area(t) / 4.0).epsilon(1e-13));
            child_area += fine.area(c);
        }
        CHECK(child_area == doctest::Approx(coarse.area(t)).epsilon(1e-13));
    }
    for (int v = 0; v < coarse.n_vertices(); ++v) {
        const Vec2 a = coarse.vertices[v];
        const Vec2 b = fine.vertices[map.vertex_embedding[v]];
        CHECK((a - b).norm() == 0.0);
    }
}

TEST_CASE("face path BFS basics") {
    const TriMesh m = build_structured_mesh({0, 0, 1, 1}, 4, 4);
    const auto all = [](int) { return true; };
    const FacePath trivial = face_path_bfs(m, 7, all);
    CHECK(trivial.target == 7);
    CHECK(trivial.crossed_faces.empty());

    const auto only = [](int t) { return t == 9; };
    // neighbor chain: the path length matches the BFS distance
    const FacePath p = face_path_bfs(m, 8, only);
    CHECK(p.target == 9);
    CHECK(p.crossed_faces.size() == bfs_distances(m, 8)[9]);

    CHECK_THROWS_AS(face_path_bfs(m, 0, [](int) { return false; }), SearchFailure);
}

TEST_CASE("face path BFS matches exhaustive search on random admissible sets") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 20; ++trial) {
        const int nx = 4 + static_cast<int>(rng() % 7);
        const int ny = 4 + static_cast<int>(rng() % 7);
        const TriMesh m = build_structured_mesh({0, 0, 1, 1}, nx, ny);
        std::vector<char> adm(m.n_triangles(), 0);
        for (int t = 0; t < m.n_triangles(); ++t) adm[t] = (rng() % 8) == 0;
        if (std::find(adm.begin(), adm.end(), 1) == adm.end()) adm[0] = 1;
        const int start = static_cast<int>(rng() % m.n_triangles());

        const FacePath p = face_path_bfs(m, start, [&](int t) { return adm[t] == 1; });
        const auto dist = bfs_distances(m, start);
        int best_dist = -1, best_idx = -1;
        for (int t = 0; t < m.n_triangles(); ++t) {
            if (!adm[t] || dist[t] < 0) continue;
            if (best_dist == -1 || dist[t] < best_dist || (dist[t] == best_dist && t < best_idx)) {
                best_dist = dist[t];
                best_idx = t;
            }
        }
        REQUIRE(best_dist >= 0);
        CHECK(static_cast<int>(p.crossed_faces.size()) == best_dist);
        CHECK(p.target == best_idx);

        // the returned faces really connect start to target
        int cur = start;
        for (int f : p.crossed_faces) {
            const Face &fc = m.faces[f];
            REQUIRE((fc.tri0 == cur || fc.tri1 == cur));
            cur = m.neighbor_across(cur, f);
        }
        CHECK(cur == p.target);
    }
}
