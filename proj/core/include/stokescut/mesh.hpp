#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "stokescut/geometry.hpp"

namespace stokescut {

struct Face {
    int v0 = -1, v1 = -1;
    int tri0 = -1, tri1 = -1; // tri1 = -1 on the domain boundary
    bool on_boundary = false;
};

/// Conforming triangulation with explicit face adjacency.
///
/// Triangles are counterclockwise. Every interior face has exactly two
/// incident triangles and every boundary face exactly one; the structured
/// generator guarantees that no triangle has two faces on the boundary.
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Face> faces;
    std::vector<std::array<int, 3>> triangle_faces; // faces opposite local vertex k
    double h_max = 0.0;
    double h_min = 0.0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_faces() const { return static_cast<int>(faces.size()); }

    std::array<Vec2, 3> triangle_coords(int t) const {
        const auto &tri = triangles[t];
        return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
    }
    double area(int t) const {
        const auto c = triangle_coords(t);
        return triangle_area(c[0], c[1], c[2]);
    }
    double diameter(int t) const;
    Vec2 centroid(int t) const {
        const auto c = triangle_coords(t);
        return (c[0] + c[1] + c[2]) / 3.0;
    }
    double face_length(int f) const { return (vertices[faces[f].v1] - vertices[faces[f].v0]).norm(); }
    int neighbor_across(int t, int f) const {
        const Face &face = faces[f];
        return face.tri0 == t ? face.tri1 : face.tri0;
    }
    int boundary_face_of(int t) const; // -1 if none
};

/// Parent/child map produced by uniform refinement.
struct RefinementMap {
    std::vector<int> parent_of;                  // fine triangle -> coarse triangle
    std::vector<std::array<int, 4>> children_of; // coarse triangle -> 4 fine triangles
    std::vector<int> vertex_embedding;           // coarse vertex -> fine vertex
};

/// Structured triangulation of a rectangle: nx-by-ny cells split along one
/// diagonal, with the split flipped in the two corner cells that would
/// otherwise own a triangle with two boundary edges.
TriMesh build_structured_mesh(const Rect &domain, int nx, int ny);

/// Split every triangle into 4 congruent children via edge midpoints.
std::pair<TriMesh, RefinementMap> uniform_refine(const TriMesh &mesh);

struct FacePath {
    int target = -1;
    std::vector<int> crossed_faces;
};

/// Breadth-first search through interior faces for the nearest admissible
/// triangle. Ties at the minimal crossing distance resolve to the lowest
/// triangle index; the returned faces are the ones crossed in order.
FacePath face_path_bfs(const TriMesh &mesh, int start, const std::function<bool(int)> &admissible);

/// Throws if any TriMesh invariant fails.
void check_mesh_invariants(const TriMesh &mesh);

} // namespace stokescut
