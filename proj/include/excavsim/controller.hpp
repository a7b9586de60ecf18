#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "excavsim/contact_map.hpp"
#include "excavsim/rng.hpp"
#include "excavsim/types.hpp"
#include "excavsim/world.hpp"

namespace excavsim {

enum class FsmState { GoingToDig, Digging, GoingHome, Resting, Collision };
enum class TripDecision { EnterTunnel, Rest };
enum class ContactResponse { PassiveManeuver, Reversal, ActivePush };
enum class Maneuver { None, BackUp, Turn, Escape, Push };

std::string_view to_string(FsmState s);
std::string_view to_string(ContactResponse r);

struct ControllerParams {
  Mode mode = Mode::Acr;
  double p_r = 0.64;
  double initial_p_e = 1.0;
  /// Give up when q > p_r instead of q < p_r.
  bool reversal_above = false;
  double delta_r = 0.1;
  double t_give_up = 60.0;
  double t_rest = 30.0;

  double dt = 0.05;
  double v_max = 10.0;
  double omega_max = 1.5;
  double lane_dig_y = 17.5;
  double lane_home_y = 52.5;
  double lookahead = 40.0;
  double heading_gain = 2.0;
  double turn_in_place = 0.6;  // rad of heading error above which the robot pivots
  double dig_creep_speed = 3.0;

  /// Reaction latency between sensing a contact and executing the response.
  double response_delay = 1.0;

  double backup_distance = 10.0;
  double turn_min = deg_to_rad(30.0);
  double turn_max = deg_to_rad(90.0);
  double escape_distance = 0.0;

  double push_speed = 10.0;
  double push_burst = 3.0;
  double push_progress = 2.0;

  void validate() const;
};

struct ControllerState {
  FsmState fsm = FsmState::Resting;
  /// Task state a Collision sub-behavior returns to.
  FsmState resume = FsmState::GoingToDig;
  int k = 1;
  double p_e = 1.0;
  bool carrying_pellet = false;
  double trip_start_time = 0.0;
  double state_entry_time = 0.0;
  std::optional<double> active_push_deadline;

  /// Response chosen at contact onset, executed once the reaction delay
  /// has elapsed, and the R_c it was drawn with.
  std::optional<ContactResponse> pending_response;
  double pending_since = 0.0;
  double pending_likelihood = 0.0;

  Maneuver maneuver = Maneuver::None;
  double maneuver_start_time = 0.0;
  double turn_target = 0.0;
  Vec2 push_direction;
  Pose burst_start;
  double last_decay_time = 0.0;

  /// The task phase, looking through a Collision sub-behavior.
  FsmState phase() const { return fsm == FsmState::Collision ? resume : fsm; }
};

struct SensedContact {
  ContactType sensed = ContactType::Wall;
  Vec2 normal;  // toward the touched object
  Vec2 bearing;  // toward the touched object's center
  bool onset = false;
};

/// Everything a controller may observe: its own odometry, its own noisy
/// longitudinal estimate, its own zone flags and its own contact sensors.
struct Observation {
  double clock = 0.0;
  Pose odometry;
  double position_estimate = 0.0;  // cm along the tunnel, noisy
  bool in_dig_zone = false;   // magnetometer trigger
  bool at_dig_face = false;   // anterior on the pellets
  bool in_home = false;
  bool pellet_acquired = false;
  bool pellet_deposited = false;
  std::vector<SensedContact> contacts;
};

enum class DecisionKind {
  TripStart,
  Rest,
  Reversal,
  PassiveManeuver,
  ActivePush,
  PushFallback,
  GiveUp,
  PelletAcquired,
  Deposit,
  TripFailed,
};

std::string_view to_string(DecisionKind k);

struct DecisionEvent {
  double time = 0.0;
  int robot = 0;
  DecisionKind kind = DecisionKind::TripStart;
  double value = 0.0;  // R_c for contact responses, P_e after trip updates
};

struct ControllerStats {
  int trips = 0;
  int successes = 0;
  int rests = 0;
  int reversals = 0;
  int give_ups = 0;
  int active_pushes = 0;
  int passive_maneuvers = 0;
  int push_fallbacks = 0;
  int robot_contacts = 0;
  int wall_contacts = 0;
};

/// Top-layer decision at the start of a trip: enter the tunnel with
/// probability p_e, otherwise rest.
TripDecision begin_trip(ControllerState& state, double clock, Rng& rng);

/// Response selection for a sensed contact.
ContactResponse on_contact(const ControllerState& state, const ControllerParams& params,
                           ContactType sensed, double r_c, double clock, Rng& rng);

/// Entrance-probability adaptation after returning home.
void on_trip_end(ControllerState& state, const ControllerParams& params, bool success);

/// One robot's controller: owns its state, its contact map and its random
/// stream. Nothing here reads another robot.
class Controller {
 public:
  Controller(int id, ControllerParams params, MapParams map_params, ContactMap map, Rng rng);

  MotorCommand tick(const Observation& obs, std::vector<DecisionEvent>& log);

  int id() const { return id_; }
  const ControllerState& state() const { return state_; }
  ControllerState& state() { return state_; }
  const ContactMap& map() const { return map_; }
  const ControllerStats& stats() const { return stats_; }
  const ControllerParams& params() const { return params_; }

  bool digging() const { return state_.fsm == FsmState::Digging; }
  bool carrying() const { return state_.carrying_pellet; }

 private:
  void log(std::vector<DecisionEvent>& out, double t, DecisionKind k, double value = 0.0) const;
  void start_trip_or_rest(double clock, std::vector<DecisionEvent>& out);
  void enter_collision(Maneuver m, double clock);
  void give_up(double clock, std::vector<DecisionEvent>& out);
  void respond(const Observation& obs, std::vector<DecisionEvent>& out);
  void execute(ContactResponse response, const Observation& obs, std::vector<DecisionEvent>& out);
  MotorCommand run_maneuver(const Observation& obs, std::vector<DecisionEvent>& out);
  MotorCommand steer_to(const Pose& pose, Vec2 target) const;
  MotorCommand steer_heading(const Pose& pose, double heading, double speed) const;

  int id_;
  ControllerParams params_;
  MapParams map_params_;
  ContactMap map_;
  Rng rng_;
  ControllerState state_;
  ControllerStats stats_;
  bool started_ = false;
};

}  // namespace excavsim
