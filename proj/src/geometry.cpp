#include "excavsim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace excavsim {

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

SegmentClosest closest_between_segments(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
  // Ericson, Real-Time Collision Detection, 5.1.9.
  constexpr double kEps = 1e-12;
  const Vec2 d1 = q1 - p1;
  const Vec2 d2 = q2 - p2;
  const Vec2 r = p1 - p2;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) {
    s = t = 0.0;
  } else if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > kEps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  SegmentClosest out;
  out.on_first = p1 + d1 * s;
  out.on_second = p2 + d2 * t;
  out.distance = norm(out.on_second - out.on_first);
  return out;
}

Penetration capsule_capsule(const Capsule& a, const Capsule& b) {
  const SegmentClosest sc = closest_between_segments(a.end_a(), a.end_b(), b.end_a(), b.end_b());
  Penetration pen;
  pen.depth = a.radius + b.radius - sc.distance;
  if (sc.distance > 1e-9) {
    pen.normal = (sc.on_second - sc.on_first) * (1.0 / sc.distance);
  } else {
    const Vec2 between = b.pose.position() - a.pose.position();
    const Vec2 side{-std::sin(a.pose.theta), std::cos(a.pose.theta)};
    pen.normal = dot(between, side) < 0.0 ? -side : side;
  }
  pen.point = sc.on_first + pen.normal * a.radius;
  return pen;
}

Penetration capsule_wall(const Capsule& c, Vec2 on_wall, Vec2 inward) {
  const double da = dot(c.end_a() - on_wall, inward);
  const double db = dot(c.end_b() - on_wall, inward);
  const Vec2 nearest = da <= db ? c.end_a() : c.end_b();
  const double d = std::min(da, db);
  Penetration pen;
  pen.depth = c.radius - d;
  pen.normal = -inward;
  pen.point = nearest + pen.normal * c.radius;
  return pen;
}

}  // namespace excavsim
