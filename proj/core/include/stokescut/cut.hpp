#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "stokescut/geometry.hpp"
#include "stokescut/level_set.hpp"
#include "stokescut/mesh.hpp"

namespace stokescut {

/// Sides are 0-based throughout: side 0 is the negative level-set region
/// (Omega_1), side 1 the positive one (Omega_2).
enum class CutCase { interior_1, interior_2, cut, edge_aligned };

struct CutElement {
    CutCase cut_case = CutCase::interior_1;
    std::array<Vec2, 2> intersections{};            // chord endpoints (cut / edge_aligned)
    Segment segment{};                              // the chord
    std::array<std::vector<Vec2>, 2> subpolygon{};  // element part on each side
    std::array<double, 2> alpha{0.0, 0.0};          // |K cap Omega_i| / h_K^2
    double gamma = 0.0;                             // chord length / h_K
    double gamma_boundary = 0.0;                    // |dOmega cap K| / h_K
    Vec2 segment_normal{};                          // unit, side 0 -> side 1
    int aligned_face = -1;                          // face id of an aligned chord

    bool is_cut_like() const { return cut_case == CutCase::cut || cut_case == CutCase::edge_aligned; }
    /// For interior/edge_aligned elements: the side the element lies on.
    int one_side() const;
    bool covers_side(int side) const;
};

/// Classify one triangle against the level set. Vertices closer to the
/// interface than snap_tol * h_K are treated as lying on it.
CutElement intersect_triangle(const std::array<Vec2, 3> &tri, const LevelSet &phi,
                              double snap_tol = 1e-10, int element = -1);

struct CutClassification {
    const TriMesh *mesh = nullptr;
    const LevelSet *phi = nullptr;
    std::vector<CutElement> elements;
    std::vector<signed char> vertex_sign; // -1 / 0 / +1 after snapping

    std::vector<int> K_Gamma;       // cut and edge-aligned elements
    std::vector<int> tilde_K_Gamma; // elements sharing two faces with K_Gamma members
    std::vector<int> K_boundary;    // elements with a face on the outer boundary

    std::array<std::vector<char>, 2> in_K_h_i;    // per-element membership, both sides
    std::array<std::vector<char>, 2> in_omega_h_i;
    std::array<std::vector<int>, 2> F_Gamma;      // ghost-penalty face sets, sorted
    std::array<std::vector<char>, 2> face_s_one;  // faces carrying the h^1 velocity weight

    std::array<std::unordered_map<int, FacePath>, 2> closest_interior;
    std::array<std::unordered_map<int, int>, 2> N_Ki; // interior element -> #boundary-cut users
    int max_N_Ki = 0;
    double c_q = 1.0;

    std::vector<char> owns_chord;      // interface-ownership set
    std::vector<int> aligned_partner;  // partner element of an aligned chord, else -1
    std::vector<signed char> promoted_side; // side granted by finer-level geometry, else -1

    bool in_K_Gamma(int t) const { return elements[t].is_cut_like(); }
    int n_elements() const { return static_cast<int>(elements.size()); }
};

/// Full decomposition of a mesh against the interface: per-element cases,
/// the index sets, ghost-penalty faces, closest fully-interior elements and
/// the quasi-uniformity ratio.
CutClassification classify(const TriMesh &mesh, const LevelSet &phi, double snap_tol = 1e-10);

/// Classification of a coarse mesh made compatible with its refinement: when
/// the interface forms a lens the coarse vertex signs cannot see but the fine
/// mesh resolves (a one-sided parent with two-sided children), the parent is
/// promoted into the missing side's mesh, with its faces joining that side's
/// ghost-penalty set. Keeps the two-level spaces consistent with the cut
/// geometry all integrals actually use.
CutClassification classify_parent(const TriMesh &coarse, const LevelSet &phi,
                                  const CutClassification &fine_cls, const RefinementMap &ref,
                                  double snap_tol = 1e-10);

/// Throws AssumptionViolation / Error when a classification invariant fails.
void check_classification_invariants(const CutClassification &cls);

} // namespace stokescut
