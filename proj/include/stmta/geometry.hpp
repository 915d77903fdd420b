#pragma once

#include <cmath>

namespace stmta {

// Planar point/vector in meters. All agents fly at one altitude.
struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(const Vec2& v, double s) { return s * v; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Moves `from` toward `to` by at most `max_step`; lands exactly on `to` when in reach.
inline Vec2 advance_toward(const Vec2& from, const Vec2& to, double max_step) {
  const Vec2 d = to - from;
  const double len = d.norm();
  if (len <= max_step || len == 0.0) return to;
  return from + (max_step / len) * d;
}

}  // namespace stmta
