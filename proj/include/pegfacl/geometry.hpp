#pragma once

// Vector helpers, the 3D Apollonius sphere and the optimal pursuit cone.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pegfacl {

class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidRatio : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) noexcept {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) noexcept {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) noexcept {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) noexcept { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) noexcept { return a *= (1.0 / s); }
  friend constexpr Vec3 operator-(const Vec3& a) noexcept { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

/// Positions are plain vectors in meters.
using Point3 = Vec3;

constexpr double dot(const Vec3& a, const Vec3& b) noexcept {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) noexcept { return std::sqrt(dot(v, v)); }

inline double distance(const Point3& a, const Point3& b) noexcept { return norm(a - b); }

inline bool is_finite(const Vec3& v) noexcept {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Angle in [0, pi] between two non-zero vectors (clamped arccos).
inline double angle_between(const Vec3& u, const Vec3& v) {
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw DegenerateInput("angle_between: zero-length vector");
  const double c = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
  return std::acos(c);
}

/// Speed ratio v_E / v_P. Always positive.
class SpeedRatio {
 public:
  constexpr explicit SpeedRatio(double a) : value_(a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidRatio("speed ratio must be finite and > 0");
  }
  static SpeedRatio from_speeds(double v_pursuer, double v_evader) {
    if (!(v_pursuer > 0.0)) throw InvalidRatio("pursuer speed must be > 0");
    return SpeedRatio(v_evader / v_pursuer);
  }
  constexpr double value() const noexcept { return value_; }

 private:
  double value_;
};

struct ApolloniusSphere {
  Point3 center;
  double radius = 0.0;
};

inline constexpr double kCoincidenceTol = 1e-12;
inline constexpr double kBoundaryTol = 1e-9;

/// Locus of points C with |EC| / |PC| = a.
///
/// center = (E - a^2 P) / (1 - a^2), radius = |a / (1 - a^2)| * |P - E|.
/// Throws DegenerateInput for coincident agents or a == 1 (the locus is a plane).
inline ApolloniusSphere apollonius_sphere(const Point3& pursuer, const Point3& evader, SpeedRatio ratio) {
  const double a = ratio.value();
  const double a2 = a * a;
  const double denom = 1.0 - a2;
  const double sep = distance(pursuer, evader);
  if (sep <= kCoincidenceTol) throw DegenerateInput("apollonius_sphere: pursuer and evader coincide");
  if (std::abs(denom) < 1e-12) throw DegenerateInput("apollonius_sphere: speed ratio of 1 has no sphere");
  return {(evader - a2 * pursuer) / denom, std::abs(a / denom) * sep};
}

enum class Region { evader_dominant, boundary, pursuer_dominant };

inline const char* to_string(Region r) noexcept {
  switch (r) {
    case Region::evader_dominant: return "evader_dominant";
    case Region::boundary: return "boundary";
    case Region::pursuer_dominant: return "pursuer_dominant";
  }
  return "?";
}

/// Classifies a point against the sphere for a < 1 (evader owns the interior).
inline Region dominance(const Point3& point, const ApolloniusSphere& sphere, SpeedRatio ratio) {
  if (!(ratio.value() < 1.0)) throw InvalidRatio("dominance requires a < 1");
  const double d = distance(point, sphere.center);
  if (std::abs(d - sphere.radius) <= kBoundaryTol) return Region::boundary;
  return d < sphere.radius ? Region::evader_dominant : Region::pursuer_dominant;
}

/// Half-angle of the pursuer's optimal cone, asin(vE / vP).
inline double pursuit_cone_halfangle(double v_pursuer, double v_evader) {
  if (!(v_evader > 0.0) || !(v_evader < v_pursuer))
    throw InvalidRatio("pursuit_cone_halfangle requires 0 < vE < vP");
  return std::asin(v_evader / v_pursuer);
}

/// alpha2 = asin((vE / vP) sin alpha1): the pursuer's lead angle that meets the
/// evader on the Apollonius sphere when the evader runs at alpha1 off the line of sight.
inline double alpha2_of_alpha1(double alpha1, double v_pursuer, double v_evader) {
  if (!(v_evader > 0.0) || !(v_evader <= v_pursuer))
    throw InvalidRatio("alpha2_of_alpha1 requires 0 < vE <= vP");
  const double arg = (v_evader / v_pursuer) * std::sin(alpha1);
  if (arg < -1.0 || arg > 1.0 || std::isnan(arg)) throw DomainError("alpha2_of_alpha1: asin argument out of [-1, 1]");
  return std::asin(arg);
}

}  // namespace pegfacl
