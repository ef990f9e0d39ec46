#include "stokescut/level_set.hpp"

#include <algorithm>
#include <cmath>

namespace stokescut {

LevelSet LevelSet::circle(Vec2 center, double radius) {
    LevelSet ls;
    ls.kind_ = Kind::circle;
    ls.center_ = center;
    ls.radius_ = radius;
    return ls;
}

LevelSet LevelSet::vertical_line(double x) {
    LevelSet ls;
    ls.kind_ = Kind::vertical_line;
    ls.offset_ = x;
    return ls;
}

LevelSet LevelSet::horizontal_line(double y) {
    LevelSet ls;
    ls.kind_ = Kind::horizontal_line;
    ls.offset_ = y;
    return ls;
}

double LevelSet::value(const Vec2 &p) const {
    switch (kind_) {
    case Kind::circle: return (p - center_).norm() - radius_;
    case Kind::vertical_line: return p.x - offset_;
    case Kind::horizontal_line: return p.y - offset_;
    }
    return 0.0;
}

Vec2 LevelSet::normal(const Vec2 &p) const {
    switch (kind_) {
    case Kind::circle: {
        const Vec2 d = p - center_;
        const double n = d.norm();
        if (n == 0.0) return {1.0, 0.0};
        return d / n;
    }
    case Kind::vertical_line: return {1.0, 0.0};
    case Kind::horizontal_line: return {0.0, 1.0};
    }
    return {1.0, 0.0};
}

double LevelSet::curvature(const Vec2 &) const {
    return kind_ == Kind::circle ? 1.0 / radius_ : 0.0;
}

std::vector<double> LevelSet::edge_crossings(const Vec2 &a, const Vec2 &b) const {
    std::vector<double> roots;
    const Vec2 d = b - a;
    switch (kind_) {
    case Kind::vertical_line:
    case Kind::horizontal_line: {
        const double fa = value(a), fb = value(b);
        if ((fa < 0.0) != (fb < 0.0) && fa != fb) {
            const double t = fa / (fa - fb);
            if (t > 0.0 && t < 1.0) roots.push_back(t);
        }
        break;
    }
    case Kind::circle: {
        // |a + t d - c|^2 = r^2
        const Vec2 m = a - center_;
        const double A = d.squared_norm();
        const double B = 2.0 * m.dot(d);
        const double C = m.squared_norm() - radius_ * radius_;
        const double disc = B * B - 4.0 * A * C;
        if (disc <= 0.0 || A == 0.0) break;
        const double s = std::sqrt(disc);
        // numerically stable pair of quadratic roots
        const double q = -0.5 * (B + (B >= 0.0 ? s : -s));
        double t0 = q / A;
        double t1 = (q != 0.0) ? C / q : t0;
        if (t0 > t1) std::swap(t0, t1);
        for (double t : {t0, t1})
            if (t > 0.0 && t < 1.0) roots.push_back(t);
        break;
    }
    }
    return roots;
}

} // namespace stokescut
