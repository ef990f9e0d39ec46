#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace stokescut {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 &operator+=(const Vec2 &o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    double dot(const Vec2 &o) const { return x * o.x + y * o.y; }
    double cross(const Vec2 &o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
    // rotate by +90 degrees
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2 &v) { return v * s; }

/// Symmetric 2x2 matrix, used for strain tensors.
struct Sym2 {
    double xx = 0.0, yy = 0.0, xy = 0.0;

    Vec2 apply(const Vec2 &n) const { return {xx * n.x + xy * n.y, xy * n.x + yy * n.y}; }
    double contract(const Sym2 &o) const { return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy; }
};

/// 2x2 matrix with rows = gradient of each velocity component.
struct Mat2 {
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

    Sym2 sym() const { return {a00, a11, 0.5 * (a01 + a10)}; }
    double trace() const { return a00 + a11; }
    double squared_norm() const { return a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11; }
    Mat2 operator-(const Mat2 &o) const { return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11}; }
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

struct Segment {
    Vec2 a, b;

    double length() const { return (b - a).norm(); }
    Vec2 midpoint() const { return (a + b) * 0.5; }
    Vec2 at(double t) const { return a + (b - a) * t; }
};

inline double triangle_area(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
    return 0.5 * (b - a).cross(c - a);
}

/// Signed area of a simple polygon (positive when counterclockwise).
inline double polygon_area(const std::vector<Vec2> &poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 &p = poly[i];
        const Vec2 &q = poly[(i + 1) % poly.size()];
        s += p.cross(q);
    }
    return 0.5 * s;
}

inline std::array<double, 3> barycentric(const std::array<Vec2, 3> &tri, const Vec2 &p) {
    const double a = triangle_area(tri[0], tri[1], tri[2]);
    return {triangle_area(p, tri[1], tri[2]) / a, triangle_area(tri[0], p, tri[2]) / a,
            triangle_area(tri[0], tri[1], p) / a};
}

/// Gradients of the three P1 nodal basis functions on a triangle.
inline std::array<Vec2, 3> p1_gradients(const std::array<Vec2, 3> &tri) {
    const double two_a = 2.0 * triangle_area(tri[0], tri[1], tri[2]);
    return {(tri[2] - tri[1]).perp() / two_a, (tri[0] - tri[2]).perp() / two_a,
            (tri[1] - tri[0]).perp() / two_a};
}

inline Vec2 polygon_centroid(const std::vector<Vec2> &poly) {
    Vec2 c{0.0, 0.0};
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 &p = poly[i];
        const Vec2 &q = poly[(i + 1) % poly.size()];
        const double w = p.cross(q);
        a += w;
        c += (p + q) * w;
    }
    return c / (3.0 * a);
}

} // namespace stokescut
