#ifndef HELMNYS_COMMON_HPP
#define HELMNYS_COMMON_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

namespace helmnys {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  Vec2 operator/(double a) const { return {x / a, y / a}; }
  Vec2 operator-() const { return {-x, -y}; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  // rotate -90 degrees; for a counterclockwise tangent this is the
  // outward normal direction
  Vec2 perp_cw() const { return {y, -x}; }
};

inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }

// R^2 point as a point in C, used by the near-evaluation weight routines
inline Complex to_complex(const Vec2& v) { return {v.x, v.y}; }

}  // namespace helmnys

#endif
