#pragma once

#include <vector>

#include "stokescut/geometry.hpp"

namespace stokescut {

/// Implicit interface description. Negative values are side 1, positive
/// values side 2; the normal points from side 1 into side 2.
class LevelSet {
  public:
    enum class Kind { circle, vertical_line, horizontal_line };

    static LevelSet circle(Vec2 center, double radius);
    static LevelSet vertical_line(double x);
    static LevelSet horizontal_line(double y);

    double value(const Vec2 &p) const;
    Vec2 normal(const Vec2 &p) const;
    double curvature(const Vec2 &p) const;
    Kind kind() const { return kind_; }

    /// Parametric positions t in (0,1) where the level set crosses the open
    /// segment a + t (b - a). Exact for the supported shapes; up to two roots.
    std::vector<double> edge_crossings(const Vec2 &a, const Vec2 &b) const;

  private:
    Kind kind_ = Kind::vertical_line;
    Vec2 center_{};
    double radius_ = 0.0;
    double offset_ = 0.0;
};

} // namespace stokescut
