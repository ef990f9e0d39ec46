#include "stokescut/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "stokescut/errors.hpp"

namespace stokescut {

double TriMesh::diameter(int t) const {
    const auto c = triangle_coords(t);
    const double a = (c[1] - c[0]).norm();
    const double b = (c[2] - c[1]).norm();
    const double d = (c[0] - c[2]).norm();
    return std::max({a, b, d});
}

int TriMesh::boundary_face_of(int t) const {
    for (int f : triangle_faces[t])
        if (faces[f].on_boundary) return f;
    return -1;
}

namespace {

void build_faces(TriMesh &mesh) {
    std::map<std::pair<int, int>, int> face_of_edge;
    mesh.faces.clear();
    mesh.triangle_faces.assign(mesh.triangles.size(), {-1, -1, -1});
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto &tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            // face opposite local vertex k
            int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
            auto key = std::minmax(a, b);
            auto it = face_of_edge.find(key);
            if (it == face_of_edge.end()) {
                Face face;
                face.v0 = key.first;
                face.v1 = key.second;
                face.tri0 = t;
                mesh.faces.push_back(face);
                int id = mesh.n_faces() - 1;
                face_of_edge.emplace(key, id);
                mesh.triangle_faces[t][k] = id;
            } else {
                Face &face = mesh.faces[it->second];
                if (face.tri1 != -1) throw Error("non-manifold edge in triangulation");
                face.tri1 = t;
                mesh.triangle_faces[t][k] = it->second;
            }
        }
    }
    for (Face &f : mesh.faces) f.on_boundary = (f.tri1 == -1);
}

void compute_sizes(TriMesh &mesh) {
    mesh.h_max = 0.0;
    mesh.h_min = std::numeric_limits<double>::max();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double h = mesh.diameter(t);
        mesh.h_max = std::max(mesh.h_max, h);
        mesh.h_min = std::min(mesh.h_min, h);
    }
}

} // namespace

TriMesh build_structured_mesh(const Rect &domain, int nx, int ny) {
    if (domain.width() <= 0.0 || domain.height() <= 0.0)
        throw InvalidDomainError("degenerate rectangle");
    if (nx < 2 || ny < 2)
        throw InvalidDomainError("structured generator requires nx, ny >= 2");

    TriMesh mesh;
    const double dx = domain.width() / nx;
    const double dy = domain.height() / ny;
    mesh.vertices.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.emplace_back(domain.x0 + i * dx, domain.y0 + j * dy);

    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    mesh.triangles.reserve(2 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            // Default "/" split; the bottom-left and top-right corner cells
            // get the "\" split so no triangle owns two boundary edges.
            const bool flip = (i == 0 && j == 0) || (i == nx - 1 && j == ny - 1);
            if (!flip) {
                mesh.triangles.push_back({v00, v10, v01});
                mesh.triangles.push_back({v10, v11, v01});
            } else {
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            }
        }
    }

    build_faces(mesh);
    compute_sizes(mesh);
    return mesh;
}

std::pair<TriMesh, RefinementMap> uniform_refine(const TriMesh &coarse) {
    TriMesh fine;
    RefinementMap map;

    fine.vertices = coarse.vertices;
    map.vertex_embedding.resize(coarse.n_vertices());
    for (int v = 0; v < coarse.n_vertices(); ++v) map.vertex_embedding[v] = v;

    // one midpoint vertex per coarse face
    std::vector<int> midpoint_of_face(coarse.n_faces());
    for (int f = 0; f < coarse.n_faces(); ++f) {
        const Face &face = coarse.faces[f];
        fine.vertices.push_back((coarse.vertices[face.v0] + coarse.vertices[face.v1]) * 0.5);
        midpoint_of_face[f] = static_cast<int>(fine.vertices.size()) - 1;
    }

    map.children_of.resize(coarse.n_triangles());
    map.parent_of.resize(4 * coarse.n_triangles());
    for (int t = 0; t < coarse.n_triangles(); ++t) {
        const auto &tri = coarse.triangles[t];
        // midpoint opposite local vertex k sits on triangle_faces[t][k]
        const int m12 = midpoint_of_face[coarse.triangle_faces[t][0]];
        const int m20 = midpoint_of_face[coarse.triangle_faces[t][1]];
        const int m01 = midpoint_of_face[coarse.triangle_faces[t][2]];
        const std::array<std::array<int, 3>, 4> children = {{
            {tri[0], m01, m20},
            {tri[1], m12, m01},
            {tri[2], m20, m12},
            {m01, m12, m20},
        }};
        for (int c = 0; c < 4; ++c) {
            fine.triangles.push_back(children[c]);
            const int id = static_cast<int>(fine.triangles.size()) - 1;
            map.children_of[t][c] = id;
            map.parent_of[id] = t;
        }
    }

    build_faces(fine);
    compute_sizes(fine);
    return {std::move(fine), std::move(map)};
}

FacePath face_path_bfs(const TriMesh &mesh, int start, const std::function<bool(int)> &admissible) {
    if (admissible(start)) return {start, {}};

    std::vector<int> pred_tri(mesh.n_triangles(), -1);
    std::vector<int> pred_face(mesh.n_triangles(), -1);
    std::vector<char> seen(mesh.n_triangles(), 0);
    seen[start] = 1;

    std::vector<int> level = {start};
    while (!level.empty()) {
        std::vector<int> next;
        for (int t : level) {
            std::array<int, 3> fs = mesh.triangle_faces[t];
            std::sort(fs.begin(), fs.end()); // deterministic visit order
            for (int f : fs) {
                if (mesh.faces[f].on_boundary) continue;
                const int n = mesh.neighbor_across(t, f);
                if (seen[n]) continue;
                seen[n] = 1;
                pred_tri[n] = t;
                pred_face[n] = f;
                next.push_back(n);
            }
        }
        int best = -1;
        for (int t : next)
            if (admissible(t) && (best == -1 || t < best)) best = t;
        if (best != -1) {
            FacePath path;
            path.target = best;
            for (int t = best; t != start; t = pred_tri[t]) path.crossed_faces.push_back(pred_face[t]);
            std::reverse(path.crossed_faces.begin(), path.crossed_faces.end());
            return path;
        }
        level = std::move(next);
    }
    throw SearchFailure("no admissible triangle reachable from element " + std::to_string(start));
}

void check_mesh_invariants(const TriMesh &mesh) {
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (mesh.area(t) <= 0.0) throw Error("non-positive triangle area / wrong orientation");
        int boundary_faces = 0;
        for (int f : mesh.triangle_faces[t])
            if (mesh.faces[f].on_boundary) ++boundary_faces;
        if (boundary_faces >= 2) throw Error("triangle with two faces on the boundary");
    }
    for (const Face &f : mesh.faces) {
        if (f.on_boundary && f.tri1 != -1) throw Error("boundary face with two triangles");
        if (!f.on_boundary && (f.tri0 == -1 || f.tri1 == -1)) throw Error("interior face without two triangles");
    }
    if (mesh.h_max > 4.0 * mesh.h_min) throw Error("quasi-uniformity bound h_max/h_min <= 4 violated");
}

} // namespace stokescut
