#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "excavsim/geometry.hpp"

using namespace excavsim;

namespace {

// Minimum distance between two densely sampled segments.
double sampled_segment_distance(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2, int n = 800) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const Vec2 a = p1 + (q1 - p1) * (static_cast<double>(i) / n);
    for (int j = 0; j <= n; ++j) {
      const Vec2 b = p2 + (q2 - p2) * (static_cast<double>(j) / n);
      best = std::min(best, norm(a - b));
    }
  }
  return best;
}

Capsule capsule_at(double x, double y, double theta) {
  Capsule c;
  c.pose = {x, y, theta};
  return c;
}

}  // namespace

TEST(Geometry, ClosestPointOnSegmentClamps) {
  const Vec2 a{0.0, 0.0};
  const Vec2 b{10.0, 0.0};
  EXPECT_EQ(closest_point_on_segment({5.0, 3.0}, a, b), (Vec2{5.0, 0.0}));
  EXPECT_EQ(closest_point_on_segment({-4.0, 1.0}, a, b), a);
  EXPECT_EQ(closest_point_on_segment({14.0, -2.0}, a, b), b);
  EXPECT_EQ(closest_point_on_segment({3.0, 3.0}, a, a), a);
}

TEST(Geometry, SegmentDistanceMatchesSampling) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec2 p1{u(gen), u(gen)};
    const Vec2 q1{u(gen), u(gen)};
    const Vec2 p2{u(gen), u(gen)};
    const Vec2 q2{u(gen), u(gen)};
    const SegmentClosest c = closest_between_segments(p1, q1, p2, q2);
    const double sampled = sampled_segment_distance(p1, q1, p2, q2);
    // Sampling overestimates by at most half the sample spacing of both segments.
    const double slack = (norm(q1 - p1) + norm(q2 - p2)) / 800.0;
    EXPECT_LE(c.distance, sampled + 1e-9);
    EXPECT_GE(c.distance, sampled - slack);
    EXPECT_NEAR(norm(c.on_first - c.on_second), c.distance, 1e-9);
  }
}

TEST(Geometry, CapsuleOverlapMatchesSampledOracle) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pos(0.0, 40.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 40; ++trial) {
    const Capsule a = capsule_at(pos(gen), pos(gen), ang(gen));
    const Capsule b = capsule_at(pos(gen), pos(gen), ang(gen));
    const double sampled = sampled_segment_distance(a.end_a(), a.end_b(), b.end_a(), b.end_b());
    const Penetration pen = capsule_capsule(a, b);
    EXPECT_NEAR(pen.depth, a.radius + b.radius - sampled, 0.05);
    EXPECT_NEAR(norm(pen.normal), 1.0, 1e-12);
  }
}

TEST(Geometry, TConfiguration) {
  // Stem end touching the middle of a crossbar.
  const Capsule bar = capsule_at(0.0, 0.0, 0.0);
  const Capsule stem = capsule_at(0.0, 7.0 + 9.0 + 9.0 - 2.0, std::numbers::pi / 2.0);
  const Penetration pen = capsule_capsule(bar, stem);
  const double sampled = sampled_segment_distance(bar.end_a(), bar.end_b(), stem.end_a(), stem.end_b());
  EXPECT_NEAR(pen.depth, 2.0, 1e-9);
  EXPECT_NEAR(pen.depth, 18.0 - sampled, 1e-9);
  EXPECT_NEAR(pen.normal.x, 0.0, 1e-12);
  EXPECT_NEAR(pen.normal.y, 1.0, 1e-12);
  EXPECT_NEAR(pen.point.y, 9.0, 1e-9);
}

TEST(Geometry, SeparatedCapsulesHaveNegativeDepth) {
  const Penetration pen = capsule_capsule(capsule_at(0.0, 0.0, 0.0), capsule_at(0.0, 30.0, 0.0));
  EXPECT_NEAR(pen.depth, -12.0, 1e-12);
}

TEST(Geometry, CoincidentAxesUsePerpendicularNormal) {
  const Penetration pen = capsule_capsule(capsule_at(5.0, 5.0, 0.0), capsule_at(5.0, 5.0, 0.0));
  EXPECT_NEAR(pen.depth, 18.0, 1e-12);
  EXPECT_NEAR(std::abs(pen.normal.y), 1.0, 1e-12);
  EXPECT_NEAR(pen.normal.x, 0.0, 1e-12);
}

TEST(Geometry, CapsuleWall) {
  // Floor wall at y = 0 with inward normal +y; a horizontal capsule 1 cm too low.
  const Penetration pen = capsule_wall(capsule_at(50.0, 8.0, 0.0), {0.0, 0.0}, {0.0, 1.0});
  EXPECT_NEAR(pen.depth, 1.0, 1e-12);
  EXPECT_NEAR(pen.normal.y, -1.0, 1e-12);
  // Vertical capsule reaches down by its full half-length.
  const Penetration tip = capsule_wall(capsule_at(50.0, 20.0, std::numbers::pi / 2.0), {0.0, 0.0}, {0.0, 1.0});
  EXPECT_NEAR(tip.depth, -4.0, 1e-12);
}
