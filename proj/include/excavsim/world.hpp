#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "excavsim/geometry.hpp"
#include "excavsim/types.hpp"

namespace excavsim {

struct MotorCommand {
  double linear = 0.0;   // cm/s along the heading
  double angular = 0.0;  // rad/s, counter-clockwise
};

enum class BodyKind { Active, Faulty };

struct RobotBody {
  Capsule shape;
  BodyKind kind = BodyKind::Active;
  MotorCommand command;
  /// Robots idling in the home staging area are lifted out of the tunnel
  /// traffic and take no part in collisions.
  bool collidable = true;

  const Pose& pose() const { return shape.pose; }
};

struct Tunnel {
  double length = 300.0;
  double width = 70.0;
  double home_x = 40.0;  // home zone is [0, home_x)
  double dig_x = 260.0;  // dig zone is (dig_x, length]

  bool in_home(Vec2 p) const { return p.x < home_x; }
  bool in_dig(double x) const { return x > dig_x; }
  bool contains(Vec2 p) const { return p.x >= 0 && p.x <= length && p.y >= 0 && p.y <= width; }
};

struct WorldParams {
  double mass_ratio = 0.5;      // share of an active-faulty overlap taken by the faulty body
  bool open_home_end = false;   // no end wall at x = 0; the home area lies beyond the mouth
  double torque_gain = 0.02;    // rad per cm of lever-weighted faulty displacement
  double wall_drag_gain = 0.1;  // same, for friction where the faulty body drags along a wall
  int max_iterations = 8;
  double penetration_tolerance = 0.1;  // cm
  double v_max = 10.0;
  double omega_max = 1.5;
  double dt_max = 0.25;

  void validate() const;
};

/// Wall identifiers used as the `second` index of wall collisions.
enum WallId : int { kWallLow = -1, kWallHigh = -2, kWallHome = -3, kWallDig = -4 };

struct Collision {
  int first = 0;
  int second = 0;  // body index, or a WallId
  double depth = 0.0;
  Vec2 normal;  // from first toward second
  Vec2 point;   // on the first body's boundary
};

struct ContactEvent {
  double time = 0.0;
  int robot = 0;
  int other = 0;  // body index or WallId
  ContactType true_type = ContactType::Wall;
  Vec2 point;
  Vec2 normal;  // from the reporting robot toward what it touches
  Vec2 bearing;  // from the reporting robot's center toward the other's center; the normal for walls
  bool onset = false;  // not in contact with `other` on the previous step
};

struct StepReport {
  std::vector<ContactEvent> contacts;
  bool converged = true;
  double residual_penetration = 0.0;
};

/// Planar tunnel with capsule robots. Active bodies follow unicycle
/// kinematics; the faulty body only moves when overlaps are resolved.
class World {
 public:
  World(Tunnel tunnel, WorldParams params, std::vector<RobotBody> bodies);

  /// Integrates commands for `dt`, resolves overlaps and returns the contacts
  /// found before resolution.
  StepReport step(std::span<const MotorCommand> commands, double dt, double time);

  std::vector<Collision> detect_collisions() const;

  /// Quasi-static positional correction. Returns false when the penetration
  /// tolerance was not reached within the iteration budget.
  bool resolve_overlaps();

  double max_penetration() const;

  const Tunnel& tunnel() const { return tunnel_; }
  const WorldParams& params() const { return params_; }
  std::span<const RobotBody> bodies() const { return bodies_; }
  const RobotBody& body(std::size_t i) const { return bodies_.at(i); }
  RobotBody& body(std::size_t i) { return bodies_.at(i); }
  std::size_t size() const { return bodies_.size(); }

  void set_collidable(std::size_t i, bool collidable);

 private:
  double resolve_pair(std::size_t i, std::size_t j);
  double resolve_walls(std::size_t i);
  void check_integrity() const;

  Tunnel tunnel_;
  WorldParams params_;
  std::vector<RobotBody> bodies_;
  std::set<std::pair<int, int>> previous_contacts_;
};

enum class PelletOutcome { None, Acquired, Deposited };

/// Continuous time a digging robot has spent with its anterior in the dig
/// zone.
struct DwellClock {
  double elapsed = 0.0;
};

/// Pellet lifecycle for one robot over one step of length `dt`: a digging
/// robot acquires a pellet after `dig_time` seconds of continuous anterior
/// presence in the dig zone; a carrying robot deposits when its center is in
/// the home zone.
PelletOutcome pellet_interaction(const Tunnel& tunnel, const RobotBody& robot, bool digging,
                                 bool carrying, double dig_time, double dt, DwellClock& dwell);

/// Wall geometry: a point on the wall and its inward unit normal.
std::pair<Vec2, Vec2> wall_plane(const Tunnel& tunnel, WallId wall);

}  // namespace excavsim
