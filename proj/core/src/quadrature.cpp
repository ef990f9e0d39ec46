#include "stokescut/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "stokescut/errors.hpp"

namespace stokescut {

namespace {

struct BaryPoint {
    double l0, l1, l2, w; // barycentric coordinates, weight relative to area 1
};

void push_sym3(std::vector<BaryPoint> &pts, double a, double w) {
    const double b = 0.5 * (1.0 - a);
    pts.push_back({a, b, b, w});
    pts.push_back({b, a, b, w});
    pts.push_back({b, b, a, w});
}

void push_sym6(std::vector<BaryPoint> &pts, double a, double b, double w) {
    const double c = 1.0 - a - b;
    pts.push_back({a, b, c, w});
    pts.push_back({a, c, b, w});
    pts.push_back({b, a, c, w});
    pts.push_back({b, c, a, w});
    pts.push_back({c, a, b, w});
    pts.push_back({c, b, a, w});
}

// Dunavant symmetric rules, weights normalized to sum 1.
std::vector<BaryPoint> reference_rule(int degree) {
    std::vector<BaryPoint> pts;
    if (degree <= 1) {
        pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0});
    } else if (degree <= 2) {
        push_sym3(pts, 2.0 / 3.0, 1.0 / 3.0);
    } else if (degree <= 4) {
        push_sym3(pts, 0.108103018168070, 0.223381589678011);
        push_sym3(pts, 0.816847572980459, 0.109951743655322);
    } else if (degree <= 5) {
        pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225});
        push_sym3(pts, 0.059715871789770, 0.132394152788506);
        push_sym3(pts, 0.797426985353087, 0.125939180544827);
    } else {
        throw Error("unsupported symmetric triangle quadrature degree");
    }
    return pts;
}

// Gauss-Legendre nodes on [0,1] and weights summing to 1.
std::vector<std::pair<double, double>> gauss_rule(int degree) {
    std::vector<std::pair<double, double>> r;
    auto push_pair = [&r](double x, double w) {
        r.emplace_back(0.5 * (1.0 - x), 0.5 * w);
        if (x != 0.0) r.emplace_back(0.5 * (1.0 + x), 0.5 * w);
    };
    if (degree <= 1) {
        push_pair(0.0, 2.0);
    } else if (degree <= 3) {
        push_pair(1.0 / std::sqrt(3.0), 1.0);
    } else if (degree <= 5) {
        push_pair(0.0, 8.0 / 9.0);
        push_pair(std::sqrt(3.0 / 5.0), 5.0 / 9.0);
    } else if (degree <= 7) {
        const double a = std::sqrt((3.0 - 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
        const double b = std::sqrt((3.0 + 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
        push_pair(a, (18.0 + std::sqrt(30.0)) / 36.0);
        push_pair(b, (18.0 - std::sqrt(30.0)) / 36.0);
    } else if (degree <= 9) {
        const double s = std::sqrt(10.0 / 7.0);
        push_pair(0.0, 128.0 / 225.0);
        push_pair(std::sqrt(5.0 - 2.0 * s) / 3.0, (322.0 + 13.0 * std::sqrt(70.0)) / 900.0);
        push_pair(std::sqrt(5.0 + 2.0 * s) / 3.0, (322.0 - 13.0 * std::sqrt(70.0)) / 900.0);
    } else {
        throw Error("unsupported line quadrature degree");
    }
    return r;
}

// collapsed (Duffy) product rule: x = u, y = v(1-u), Jacobian (1-u); exact
// for total degree d with ceil((d+2)/2) Gauss points per direction
std::vector<BaryPoint> duffy_rule(int degree) {
    const auto g = gauss_rule(degree + 1); // covers the degree-(d+1) u factor
    std::vector<BaryPoint> pts;
    for (auto [u, wu] : g)
        for (auto [v, wv] : g) {
            const double x = u, y = v * (1.0 - u);
            pts.push_back({1.0 - x - y, x, y, 2.0 * wu * wv * (1.0 - u)});
        }
    return pts;
}

} // namespace

QuadratureRule triangle_quadrature(const std::array<Vec2, 3> &tri, int degree) {
    const double area = triangle_area(tri[0], tri[1], tri[2]);
    QuadratureRule rule;
    const auto pts = degree <= 5 ? reference_rule(degree) : duffy_rule(degree);
    for (const BaryPoint &bp : pts) {
        rule.points.push_back(tri[0] * bp.l0 + tri[1] * bp.l1 + tri[2] * bp.l2);
        rule.weights.push_back(bp.w * area);
    }
    return rule;
}

QuadratureRule subpolygon_quadrature(const std::vector<Vec2> &poly, int degree) {
    QuadratureRule rule;
    if (poly.size() < 3) return rule;
    double scale = 0.0;
    for (const Vec2 &p : poly)
        for (const Vec2 &q : poly) scale = std::max(scale, (p - q).squared_norm());
    const double area = polygon_area(poly);
    if (area < 1e-14 * scale) return rule; // degenerate sliver: side skipped
    const Vec2 c = polygon_centroid(poly);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const std::array<Vec2, 3> tri = {c, poly[i], poly[(i + 1) % poly.size()]};
        QuadratureRule part = triangle_quadrature(tri, degree);
        rule.points.insert(rule.points.end(), part.points.begin(), part.points.end());
        rule.weights.insert(rule.weights.end(), part.weights.begin(), part.weights.end());
    }
    return rule;
}

QuadratureRule interface_quadrature(const Segment &seg, int degree) {
    QuadratureRule rule;
    const double len = seg.length();
    for (auto [t, w] : gauss_rule(degree)) {
        rule.points.push_back(seg.at(t));
        rule.weights.push_back(w * len);
    }
    return rule;
}

std::pair<QuadratureRule, QuadratureRule> boundary_quadrature(const Segment &face, const LevelSet &phi,
                                                              int degree) {
    const double fa = phi.value(face.a);
    const double fb = phi.value(face.b);
    auto rule_between = [&](double t0, double t1) {
        return interface_quadrature({face.at(t0), face.at(t1)}, degree);
    };

    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
        auto roots = phi.edge_crossings(face.a, face.b);
        const double t = roots.empty() ? fa / (fa - fb) : roots.front();
        QuadratureRule first = rule_between(0.0, t);
        QuadratureRule second = rule_between(t, 1.0);
        if (fa < 0.0) return {std::move(first), std::move(second)};
        return {std::move(second), std::move(first)};
    }
    // uncut face: assign by the sign away from a possibly touching endpoint
    const double s = (fa + fb != 0.0) ? fa + fb : phi.value(face.midpoint());
    if (s < 0.0) return {rule_between(0.0, 1.0), {}};
    return {{}, rule_between(0.0, 1.0)};
}

} // namespace stokescut
