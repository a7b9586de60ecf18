#include "excavsim/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace excavsim {

namespace {

constexpr double kWallDragMargin = 0.5;
constexpr std::array<WallId, 4> kWalls{kWallLow, kWallHigh, kWallHome, kWallDig};

bool is_active(const RobotBody& b) { return b.kind == BodyKind::Active; }

}  // namespace

void WorldParams::validate() const {
  auto fail = [](const char* field, double value, const char* range) {
    std::ostringstream os;
    os << field << " = " << value << " is outside its valid range " << range;
    throw ConfigError(os.str());
  };
  if (!(mass_ratio >= 0.0 && mass_ratio <= 1.0)) fail("mass_ratio", mass_ratio, "[0, 1]");
  if (!(torque_gain >= 0.0)) fail("torque_gain", torque_gain, "[0, inf)");
  if (!(wall_drag_gain >= 0.0)) fail("wall_drag_gain", wall_drag_gain, "[0, inf)");
  if (max_iterations < 1) fail("max_iterations", max_iterations, "[1, inf)");
  if (!(penetration_tolerance > 0.0)) fail("penetration_tolerance_cm", penetration_tolerance, "(0, inf)");
  if (!(v_max > 0.0)) fail("v_max", v_max, "(0, inf)");
  if (!(omega_max > 0.0)) fail("omega_max", omega_max, "(0, inf)");
  if (!(dt_max > 0.0)) fail("dt_max", dt_max, "(0, inf)");
}

std::pair<Vec2, Vec2> wall_plane(const Tunnel& tunnel, WallId wall) {
  switch (wall) {
    case kWallLow: return {{0.0, 0.0}, {0.0, 1.0}};
    case kWallHigh: return {{0.0, tunnel.width}, {0.0, -1.0}};
    case kWallHome: return {{0.0, 0.0}, {1.0, 0.0}};
    case kWallDig: return {{tunnel.length, 0.0}, {-1.0, 0.0}};
  }
  throw std::invalid_argument("unknown wall");
}

World::World(Tunnel tunnel, WorldParams params, std::vector<RobotBody> bodies)
    : tunnel_(tunnel), params_(params), bodies_(std::move(bodies)) {
  check_integrity();
}

void World::set_collidable(std::size_t i, bool collidable) { bodies_.at(i).collidable = collidable; }

std::vector<Collision> World::detect_collisions() const {
  std::vector<Collision> out;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    if (!bodies_[i].collidable) continue;
    for (std::size_t j = i + 1; j < bodies_.size(); ++j) {
      if (!bodies_[j].collidable) continue;
      const Penetration pen = capsule_capsule(bodies_[i].shape, bodies_[j].shape);
      if (pen.depth > 0.0) {
        out.push_back({static_cast<int>(i), static_cast<int>(j), pen.depth, pen.normal, pen.point});
      }
    }
    for (WallId w : kWalls) {
      if (w == kWallHome && params_.open_home_end) continue;
      const auto [on_wall, inward] = wall_plane(tunnel_, w);
      const Penetration pen = capsule_wall(bodies_[i].shape, on_wall, inward);
      if (pen.depth > 0.0) {
        out.push_back({static_cast<int>(i), static_cast<int>(w), pen.depth, pen.normal, pen.point});
      }
    }
  }
  return out;
}

double World::max_penetration() const {
  double worst = 0.0;
  for (const Collision& c : detect_collisions()) worst = std::max(worst, c.depth);
  return worst;
}

double World::resolve_pair(std::size_t i, std::size_t j) {
  RobotBody* a = &bodies_[i];
  RobotBody* b = &bodies_[j];
  // Keep the faulty body second so the mass split and torque apply to it.
  if (!is_active(*a) && is_active(*b)) std::swap(a, b);
  const Penetration pen = capsule_capsule(a->shape, b->shape);
  if (pen.depth <= 0.0) return 0.0;

  if (is_active(*a) == is_active(*b)) {
    a->shape.pose.x -= pen.normal.x * pen.depth * 0.5;
    a->shape.pose.y -= pen.normal.y * pen.depth * 0.5;
    b->shape.pose.x += pen.normal.x * pen.depth * 0.5;
    b->shape.pose.y += pen.normal.y * pen.depth * 0.5;
    return pen.depth;
  }

  const double mu = params_.mass_ratio;
  const Vec2 pushed = pen.normal * (pen.depth * mu);
  a->shape.pose.x -= pen.normal.x * pen.depth * (1.0 - mu);
  a->shape.pose.y -= pen.normal.y * pen.depth * (1.0 - mu);

  const Vec2 lever = pen.point - b->shape.pose.position();
  b->shape.pose.x += pushed.x;
  b->shape.pose.y += pushed.y;
  b->shape.pose.theta = wrap_angle(b->shape.pose.theta +
                                   params_.torque_gain * cross(lever, pushed) / b->shape.half_length());

  // Friction at a wall the faulty body is dragged along pivots it about the
  // dragging end.
  for (WallId w : kWalls) {
    if (w == kWallHome && params_.open_home_end) continue;
    const auto [on_wall, inward] = wall_plane(tunnel_, w);
    const Penetration drag = capsule_wall(b->shape, on_wall, inward);
    if (drag.depth < -kWallDragMargin) continue;
    const Vec2 along = pushed - inward * dot(pushed, inward);
    const Vec2 arm = drag.point - b->shape.pose.position();
    b->shape.pose.theta = wrap_angle(b->shape.pose.theta -
                                     params_.wall_drag_gain * cross(arm, along) / b->shape.half_length());
  }
  return pen.depth;
}

double World::resolve_walls(std::size_t i) {
  double worst = 0.0;
  Pose& pose = bodies_[i].shape.pose;
  for (WallId w : kWalls) {
    if (w == kWallHome && params_.open_home_end) continue;
    const auto [on_wall, inward] = wall_plane(tunnel_, w);
    const Penetration pen = capsule_wall(bodies_[i].shape, on_wall, inward);
    if (pen.depth > 0.0) {
      pose.x += inward.x * pen.depth;
      pose.y += inward.y * pen.depth;
      worst = std::max(worst, pen.depth);
    }
  }
  return worst;
}

bool World::resolve_overlaps() {
  for (int iter = 0; iter < params_.max_iterations; ++iter) {
    if (max_penetration() <= params_.penetration_tolerance) return true;
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
      if (!bodies_[i].collidable) continue;
      for (std::size_t j = i + 1; j < bodies_.size(); ++j) {
        if (bodies_[j].collidable) resolve_pair(i, j);
      }
    }
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
      if (bodies_[i].collidable) resolve_walls(i);
    }
  }
  return max_penetration() <= params_.penetration_tolerance;
}

StepReport World::step(std::span<const MotorCommand> commands, double dt, double time) {
  if (!(dt > 0.0 && dt <= params_.dt_max)) {
    std::ostringstream os;
    os << "time step " << dt << " s outside (0, " << params_.dt_max << "]";
    throw std::invalid_argument(os.str());
  }
  if (commands.size() != bodies_.size()) {
    throw std::invalid_argument("one motor command per body required");
  }

  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    RobotBody& b = bodies_[i];
    if (!is_active(b)) {
      b.command = {};
      continue;
    }
    b.command.linear = std::clamp(commands[i].linear, -params_.v_max, params_.v_max);
    b.command.angular = std::clamp(commands[i].angular, -params_.omega_max, params_.omega_max);
    Pose& p = b.shape.pose;
    p.x += b.command.linear * std::cos(p.theta) * dt;
    p.y += b.command.linear * std::sin(p.theta) * dt;
    p.theta = wrap_angle(p.theta + b.command.angular * dt);
  }
  check_integrity();

  StepReport report;
  std::set<std::pair<int, int>> current;
  auto emit = [&](int robot, int other, ContactType type, Vec2 point, Vec2 normal) {
    const bool onset = !previous_contacts_.contains({robot, other});
    current.insert({robot, other});
    Vec2 bearing = normal;
    if (other >= 0) {
      const Vec2 d = bodies_[static_cast<std::size_t>(other)].shape.pose.position() -
                     bodies_[static_cast<std::size_t>(robot)].shape.pose.position();
      if (norm(d) > 1e-12) bearing = d * (1.0 / norm(d));
    }
    report.contacts.push_back({time, robot, other, type, point, normal, bearing, onset});
  };
  for (const Collision& c : detect_collisions()) {
    const RobotBody& first = bodies_[static_cast<std::size_t>(c.first)];
    if (c.second < 0) {
      if (is_active(first)) emit(c.first, c.second, ContactType::Wall, c.point, c.normal);
      continue;
    }
    const RobotBody& second = bodies_[static_cast<std::size_t>(c.second)];
    if (is_active(first)) emit(c.first, c.second, ContactType::Robot, c.point, c.normal);
    if (is_active(second)) {
      const Penetration back = capsule_capsule(second.shape, first.shape);
      emit(c.second, c.first, ContactType::Robot, back.point, back.normal);
    }
  }
  previous_contacts_ = std::move(current);

  report.converged = resolve_overlaps();
  report.residual_penetration = max_penetration();
  for (RobotBody& b : bodies_) {
    b.shape.pose.x = std::clamp(b.shape.pose.x, 0.0, tunnel_.length);
    b.shape.pose.y = std::clamp(b.shape.pose.y, 0.0, tunnel_.width);
  }
  check_integrity();
  return report;
}

void World::check_integrity() const {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const Pose& p = bodies_[i].shape.pose;
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.theta)) {
      std::ostringstream os;
      os << "body " << i << " has a non-finite pose";
      throw IntegrityError(os.str());
    }
  }
}

PelletOutcome pellet_interaction(const Tunnel& tunnel, const RobotBody& robot, bool digging,
                                 bool carrying, double dig_time, double dt, DwellClock& dwell) {
  const Pose& p = robot.pose();
  if (carrying) {
    dwell.elapsed = 0.0;
    return tunnel.in_home(p.position()) ? PelletOutcome::Deposited : PelletOutcome::None;
  }
  const double anterior_x = p.x + robot.shape.half_length() * std::cos(p.theta);
  if (!digging || !tunnel.in_dig(anterior_x)) {
    dwell.elapsed = 0.0;
    return PelletOutcome::None;
  }
  dwell.elapsed += dt;
  // Slack absorbs round-off from summing dt.
  if (dwell.elapsed >= dig_time - 1e-9) {
    dwell.elapsed = 0.0;
    return PelletOutcome::Acquired;
  }
  return PelletOutcome::None;
}

}  // namespace excavsim
