#include "stokescut/cut.hpp"

#include <algorithm>
#include <cmath>

#include "stokescut/errors.hpp"

namespace stokescut {

int CutElement::one_side() const {
    switch (cut_case) {
    case CutCase::interior_1: return 0;
    case CutCase::interior_2: return 1;
    case CutCase::edge_aligned: return subpolygon[0].empty() ? 1 : 0;
    case CutCase::cut: break;
    }
    throw Error("cut element has no single side");
}

bool CutElement::covers_side(int side) const {
    if (cut_case == CutCase::cut) return true;
    return one_side() == side;
}

namespace {

signed char sign_of(double v) { return v < 0.0 ? -1 : (v > 0.0 ? 1 : 0); }

Vec2 oriented_chord_normal(const Segment &seg, const LevelSet &phi) {
    Vec2 n = (seg.b - seg.a).perp().normalized();
    if (n.dot(phi.normal(seg.midpoint())) < 0.0) n = n * (-1.0);
    return n;
}

// Detects a level-set lens dipping through a single edge whose endpoints sit
// on one side. Shallow tangency lenses are absorbed into the chord geometry;
// a deep one means the mesh cannot resolve the interface.
void check_edge_lens(const Vec2 &a, const Vec2 &b, const LevelSet &phi, double h_K, int element) {
    auto roots = phi.edge_crossings(a, b);
    double prev = -1.0;
    int interior_roots = 0;
    for (double t : roots) {
        if (t > 1e-9 && t < 1.0 - 1e-9) {
            ++interior_roots;
            if (interior_roots == 1) prev = t;
        }
    }
    if (interior_roots < 2) return;
    const double t_mid = 0.5 * (prev + roots.back());
    const double depth = std::abs(phi.value(a + (b - a) * t_mid));
    if (depth > 0.2 * h_K)
        throw AssumptionViolation("interface crosses an element edge twice; mesh too coarse", element);
}

CutElement classify_element(const std::array<Vec2, 3> &tri, const LevelSet &phi,
                            const std::array<signed char, 3> &sign, double h_K, int element) {
    CutElement ce;
    const int zeros = (sign[0] == 0) + (sign[1] == 0) + (sign[2] == 0);
    const int neg = (sign[0] < 0) + (sign[1] < 0) + (sign[2] < 0);
    const int pos = (sign[0] > 0) + (sign[1] > 0) + (sign[2] > 0);

    for (int k = 0; k < 3; ++k)
        if (sign[k] * sign[(k + 1) % 3] >= 0) check_edge_lens(tri[k], tri[(k + 1) % 3], phi, h_K, element);

    if (zeros == 3) throw AssumptionViolation("all three vertices on the interface", element);

    auto set_one_sided = [&](int side) {
        ce.cut_case = side == 0 ? CutCase::interior_1 : CutCase::interior_2;
        ce.subpolygon[side] = {tri[0], tri[1], tri[2]};
        ce.alpha[side] = triangle_area(tri[0], tri[1], tri[2]) / (h_K * h_K);
    };

    if (neg == 0 || pos == 0) {
        if (zeros == 2 && neg + pos == 1) {
            // candidate aligned chord; classify() may demote it when the
            // neighbor across the zero edge does not oppose
            ce.cut_case = CutCase::edge_aligned;
            const int side = neg == 1 ? 0 : 1;
            std::array<Vec2, 2> ends;
            int n_ends = 0;
            for (int k = 0; k < 3; ++k)
                if (sign[k] == 0) ends[n_ends++] = tri[k];
            ce.intersections = ends;
            ce.segment = {ends[0], ends[1]};
            ce.subpolygon[side] = {tri[0], tri[1], tri[2]};
            ce.alpha[side] = triangle_area(tri[0], tri[1], tri[2]) / (h_K * h_K);
            ce.gamma = ce.segment.length() / h_K;
            ce.segment_normal = oriented_chord_normal(ce.segment, phi);
            return ce;
        }
        set_one_sided(pos > 0 ? 1 : 0);
        return ce;
    }

    // genuine cut: walk the triangle, splitting along the chord
    ce.cut_case = CutCase::cut;
    std::vector<Vec2> poly[2];
    std::array<Vec2, 2> cuts;
    int n_cuts = 0;
    for (int k = 0; k < 3; ++k) {
        const Vec2 &v = tri[k];
        if (sign[k] <= 0) poly[0].push_back(v);
        if (sign[k] >= 0) poly[1].push_back(v);
        if (sign[k] == 0) {
            if (n_cuts >= 2) throw AssumptionViolation("more than two interface intersections", element);
            cuts[n_cuts++] = v;
        }
        const int kn = (k + 1) % 3;
        if (sign[k] * sign[kn] < 0) {
            auto roots = phi.edge_crossings(v, tri[kn]);
            const double fa = phi.value(v), fb = phi.value(tri[kn]);
            const double t = roots.empty() ? fa / (fa - fb) : roots.front();
            const Vec2 p = v + (tri[kn] - v) * t;
            if (n_cuts >= 2) throw AssumptionViolation("more than two interface intersections", element);
            cuts[n_cuts++] = p;
            poly[0].push_back(p);
            poly[1].push_back(p);
        }
    }
    if (n_cuts != 2) throw AssumptionViolation("could not resolve interface chord", element);

    ce.intersections = cuts;
    ce.segment = {cuts[0], cuts[1]};
    ce.gamma = ce.segment.length() / h_K;
    ce.segment_normal = oriented_chord_normal(ce.segment, phi);
    for (int s = 0; s < 2; ++s) {
        ce.subpolygon[s] = std::move(poly[s]);
        ce.alpha[s] = polygon_area(ce.subpolygon[s]) / (h_K * h_K);
    }
    return ce;
}

} // namespace

CutElement intersect_triangle(const std::array<Vec2, 3> &tri, const LevelSet &phi, double snap_tol,
                              int element) {
    const double h_K = std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[1]).norm(), (tri[0] - tri[2]).norm()});
    std::array<signed char, 3> sign;
    for (int k = 0; k < 3; ++k) {
        const double v = phi.value(tri[k]);
        sign[k] = std::abs(v) < snap_tol * h_K ? 0 : sign_of(v);
    }
    return classify_element(tri, phi, sign, h_K, element);
}

namespace {

// promote[t] in {-1, 0, 1}: grants the element membership of that side's
// mesh on top of its geometric case
CutClassification classify_impl(const TriMesh &mesh, const LevelSet &phi, double snap_tol,
                                const std::vector<signed char> *promote) {
    CutClassification cls;
    cls.mesh = &mesh;
    cls.phi = &phi;
    const int nt = mesh.n_triangles();

    cls.vertex_sign.resize(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const double val = phi.value(mesh.vertices[v]);
        cls.vertex_sign[v] = std::abs(val) < snap_tol * mesh.h_max ? 0 : sign_of(val);
    }

    cls.elements.resize(nt);
    cls.owns_chord.assign(nt, 0);
    cls.aligned_partner.assign(nt, -1);
    cls.promoted_side.assign(nt, -1);
    if (promote) cls.promoted_side = *promote;
    for (int t = 0; t < nt; ++t) {
        const auto &tri = mesh.triangles[t];
        const std::array<signed char, 3> sign = {cls.vertex_sign[tri[0]], cls.vertex_sign[tri[1]],
                                                 cls.vertex_sign[tri[2]]};
        cls.elements[t] = classify_element(mesh.triangle_coords(t), phi, sign, mesh.diameter(t), t);
    }

    // resolve aligned-chord candidates: a genuine aligned chord is shared by
    // two one-sided elements on opposite sides; anything else is demoted to a
    // touching interior element
    for (int t = 0; t < nt; ++t) {
        CutElement &ce = cls.elements[t];
        if (ce.cut_case != CutCase::edge_aligned) continue;
        int face = -1;
        for (int f : mesh.triangle_faces[t]) {
            const Face &fc = mesh.faces[f];
            if (cls.vertex_sign[fc.v0] == 0 && cls.vertex_sign[fc.v1] == 0) face = f;
        }
        const int partner = (face >= 0 && !mesh.faces[face].on_boundary) ? mesh.neighbor_across(t, face) : -1;
        bool genuine = false;
        if (partner >= 0) {
            const CutElement &pe = cls.elements[partner];
            if (pe.cut_case == CutCase::edge_aligned && pe.one_side() != ce.one_side()) genuine = true;
        }
        if (genuine) {
            ce.aligned_face = face;
            cls.aligned_partner[t] = partner;
            if (t < partner) cls.owns_chord[t] = 1;
        } else {
            const int side = ce.one_side();
            CutElement plain;
            plain.cut_case = side == 0 ? CutCase::interior_1 : CutCase::interior_2;
            plain.subpolygon[side] = ce.subpolygon[side];
            plain.alpha[side] = ce.alpha[side];
            ce = plain;
        }
    }
    for (int t = 0; t < nt; ++t)
        if (cls.elements[t].cut_case == CutCase::cut) cls.owns_chord[t] = 1;

    for (int t = 0; t < nt; ++t) {
        CutElement &ce = cls.elements[t];
        const int bf = mesh.boundary_face_of(t);
        if (bf >= 0) {
            ce.gamma_boundary = mesh.face_length(bf) / mesh.diameter(t);
            cls.K_boundary.push_back(t);
        }
        if (ce.is_cut_like()) cls.K_Gamma.push_back(t);
    }

    for (int s = 0; s < 2; ++s) {
        cls.in_K_h_i[s].assign(nt, 0);
        cls.in_omega_h_i[s].assign(nt, 0);
    }
    for (int t = 0; t < nt; ++t) {
        const CutElement &ce = cls.elements[t];
        if (ce.cut_case == CutCase::cut || ce.cut_case == CutCase::edge_aligned) {
            cls.in_K_h_i[0][t] = cls.in_K_h_i[1][t] = 1;
        } else {
            cls.in_K_h_i[ce.one_side()][t] = 1;
        }
        if (cls.promoted_side[t] >= 0) cls.in_K_h_i[cls.promoted_side[t]][t] = 1;
    }

    std::vector<char> in_K_Gamma(nt, 0);
    for (int t : cls.K_Gamma) in_K_Gamma[t] = 1;
    for (int t = 0; t < nt; ++t) {
        if (in_K_Gamma[t]) continue;
        int shared = 0;
        for (int f : mesh.triangle_faces[t]) {
            if (mesh.faces[f].on_boundary) continue;
            if (in_K_Gamma[mesh.neighbor_across(t, f)]) ++shared;
        }
        if (shared >= 2) cls.tilde_K_Gamma.push_back(t);
    }
    std::vector<char> in_band(nt, 0);
    for (int t : cls.K_Gamma) in_band[t] = 1;
    for (int t : cls.tilde_K_Gamma) in_band[t] = 1;
    for (int t = 0; t < nt; ++t)
        if (cls.promoted_side[t] >= 0) in_band[t] = 1;

    for (int t = 0; t < nt; ++t) {
        const CutElement &ce = cls.elements[t];
        if (ce.cut_case == CutCase::cut) continue;
        if (!in_band[t]) cls.in_omega_h_i[ce.one_side()][t] = 1;
    }

    // ghost-penalty face sets: the face must carry positive side-s measure
    // and both incident elements must hold side-s dofs
    for (int s = 0; s < 2; ++s) {
        std::vector<char> taken(mesh.n_faces(), 0);
        for (int t = 0; t < nt; ++t) {
            if (!in_band[t]) continue;
            for (int f : mesh.triangle_faces[t]) {
                const Face &fc = mesh.faces[f];
                if (fc.on_boundary || taken[f]) continue;
                if (!cls.in_K_h_i[s][fc.tri0] || !cls.in_K_h_i[s][fc.tri1]) continue;
                const signed char sa = cls.vertex_sign[fc.v0];
                const signed char sb = cls.vertex_sign[fc.v1];
                const signed char want = s == 0 ? -1 : 1;
                const bool qualifies = sa == want || sb == want || (sa == 0 && sb == 0) ||
                                       cls.promoted_side[fc.tri0] == s || cls.promoted_side[fc.tri1] == s;
                if (!qualifies) continue;
                taken[f] = 1;
                cls.F_Gamma[s].push_back(f);
            }
        }
        std::sort(cls.F_Gamma[s].begin(), cls.F_Gamma[s].end());
    }

    // closest fully-interior elements, quasi-uniformity ratio, boundary counts
    auto fully_inside = [&cls](int side) {
        return [&cls, side](int t) {
            const CutElement &e = cls.elements[t];
            return e.cut_case != CutCase::cut && e.one_side() == side;
        };
    };
    cls.c_q = 1.0;
    for (int s = 0; s < 2; ++s) cls.face_s_one[s].assign(mesh.n_faces(), 0);
    for (int t : cls.K_Gamma) {
        for (int s = 0; s < 2; ++s) {
            FacePath path;
            try {
                path = face_path_bfs(mesh, t, fully_inside(s));
            } catch (const SearchFailure &) {
                throw AssumptionViolation("no fully interior element reachable on side " + std::to_string(s + 1),
                                          t);
            }
            const double area_K = mesh.area(t);
            cls.c_q = std::max(cls.c_q, area_K / mesh.area(path.target));
            for (int f : path.crossed_faces)
                cls.c_q = std::max(cls.c_q, area_K / (mesh.face_length(f) * mesh.h_max));
            cls.closest_interior[s].emplace(t, std::move(path));
        }
    }
    for (int t : cls.K_boundary) {
        const CutElement &ce = cls.elements[t];
        if (ce.cut_case != CutCase::cut) continue;
        for (int s = 0; s < 2; ++s) {
            const FacePath &path = cls.closest_interior[s].at(t);
            cls.N_Ki[s][path.target] += 1;
            for (int f : path.crossed_faces) cls.face_s_one[s][f] = 1;
        }
    }
    cls.max_N_Ki = 0;
    for (int s = 0; s < 2; ++s)
        for (const auto &[k, n] : cls.N_Ki[s]) cls.max_N_Ki = std::max(cls.max_N_Ki, n);

    return cls;
}

} // namespace

CutClassification classify(const TriMesh &mesh, const LevelSet &phi, double snap_tol) {
    return classify_impl(mesh, phi, snap_tol, nullptr);
}

CutClassification classify_refined(const TriMesh &fine, const LevelSet &phi,
                                   const CutClassification &coarse_cls, const RefinementMap &ref,
                                   double snap_tol) {
    CutClassification raw = classify_impl(fine, phi, snap_tol, nullptr);
    std::vector<signed char> force(fine.n_triangles(), -1);
    bool any = false;
    for (int t = 0; t < fine.n_triangles(); ++t) {
        const CutElement &pe = coarse_cls.elements[ref.parent_of[t]];
        if (pe.is_cut_like()) continue;
        const int ps = pe.one_side();
        const CutElement &fe = raw.elements[t];
        const bool conflict = fe.is_cut_like() ? true : fe.one_side() != ps;
        if (conflict) {
            force[t] = static_cast<signed char>(ps);
            any = true;
        }
    }
    if (!any) return raw;
    return classify_impl(fine, phi, snap_tol, &force);
}

void check_classification_invariants(const CutClassification &cls) {
    const TriMesh &mesh = *cls.mesh;
    for (int t = 0; t < cls.n_elements(); ++t) {
        const CutElement &ce = cls.elements[t];
        const double area = mesh.area(t);
        const double h = mesh.diameter(t);
        const double sum = (ce.alpha[0] + ce.alpha[1]) * h * h;
        if (std::abs(sum - area) > 1e-12 * area)
            throw Error("cut element area partition violated at element " + std::to_string(t));
        if (ce.cut_case == CutCase::cut && !(ce.alpha[0] > 0.0 && ce.alpha[1] > 0.0))
            throw Error("cut element with an empty side at element " + std::to_string(t));
        if (ce.is_cut_like()) {
            const double n = ce.segment_normal.norm();
            if (std::abs(n - 1.0) > 1e-12) throw Error("segment normal not unit");
            if (ce.segment_normal.dot(cls.phi->normal(ce.segment.midpoint())) <= 0.0)
                throw Error("segment normal orientation inconsistent with level set");
        }
    }
    for (int s = 0; s < 2; ++s) {
        std::vector<char> in_band(cls.n_elements(), 0);
        for (int t : cls.K_Gamma) in_band[t] = 1;
        for (int t : cls.tilde_K_Gamma) in_band[t] = 1;
        for (int f : cls.F_Gamma[s]) {
            const Face &fc = mesh.faces[f];
            if (fc.on_boundary) throw Error("ghost-penalty face on the outer boundary");
            if (!in_band[fc.tri0] && !in_band[fc.tri1])
                throw Error("ghost-penalty face not attached to the interface band");
        }
    }
    for (int t : cls.K_Gamma) {
        for (int s = 0; s < 2; ++s) {
            const auto it = cls.closest_interior[s].find(t);
            if (it == cls.closest_interior[s].end())
                throw Error("missing closest interior element for a cut element");
            const CutElement &target = cls.elements[it->second.target];
            if (target.cut_case == CutCase::cut || target.one_side() != s)
                throw Error("closest interior element is not fully on its side");
        }
    }
}

} // namespace stokescut
