#pragma once

#include "excavsim/types.hpp"

namespace excavsim {

/// Stadium footprint: the set of points within `radius` of the segment of
/// half-length `half_segment` through the pose along its heading.
struct Capsule {
  Pose pose;
  double half_segment = 7.0;
  double radius = 9.0;

  Vec2 end_a() const { return pose.position() + pose.heading() * half_segment; }
  Vec2 end_b() const { return pose.position() - pose.heading() * half_segment; }
  double half_length() const { return half_segment + radius; }
};

struct SegmentClosest {
  Vec2 on_first;
  Vec2 on_second;
  double distance = 0.0;
};

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b);

/// Closest points between segments [p1,q1] and [p2,q2].
SegmentClosest closest_between_segments(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2);

struct Penetration {
  double depth = 0.0;  // > 0 when overlapping
  Vec2 normal;        // unit, from the first body toward the second
  Vec2 point;         // contact point on the first body's boundary
};

/// Overlap of two capsules. Coincident axes fall back to a normal
/// perpendicular to the first capsule's heading.
Penetration capsule_capsule(const Capsule& a, const Capsule& b);

/// Overlap of a capsule with the half-plane {p : dot(p - on_wall, inward) < 0}
/// behind a wall whose inward unit normal is `inward`.
Penetration capsule_wall(const Capsule& c, Vec2 on_wall, Vec2 inward);

}  // namespace excavsim
