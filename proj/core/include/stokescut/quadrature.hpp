#pragma once

#include <array>
#include <utility>
#include <vector>

#include "stokescut/geometry.hpp"
#include "stokescut/level_set.hpp"

namespace stokescut {

struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// Symmetric rule on an arbitrary triangle, exact for polynomials up to the
/// requested degree (supported degrees 1..8).
QuadratureRule triangle_quadrature(const std::array<Vec2, 3> &tri, int degree);

/// Rule on a convex polygon (3-4 vertices from triangle cuts): fan triangles
/// from the centroid, each carrying the symmetric triangle rule. Degenerate
/// polygons (area below 1e-14 * bbox^2) yield an empty rule.
QuadratureRule subpolygon_quadrature(const std::vector<Vec2> &poly, int degree);

/// Gauss-Legendre points on a straight segment; weights sum to its length.
QuadratureRule interface_quadrature(const Segment &seg, int degree);

/// Splits a boundary face at its level-set crossing (if any) and returns the
/// side-1 and side-2 line rules.
std::pair<QuadratureRule, QuadratureRule> boundary_quadrature(const Segment &face, const LevelSet &phi,
                                                              int degree);

} // namespace stokescut
