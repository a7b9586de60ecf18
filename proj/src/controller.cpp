#include "excavsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace excavsim {

std::string_view to_string(FsmState s) {
  switch (s) {
    case FsmState::GoingToDig: return "going_to_dig";
    case FsmState::Digging: return "digging";
    case FsmState::GoingHome: return "going_home";
    case FsmState::Resting: return "resting";
    case FsmState::Collision: return "collision";
  }
  return "unknown";
}

std::string_view to_string(ContactResponse r) {
  switch (r) {
    case ContactResponse::PassiveManeuver: return "passive_maneuver";
    case ContactResponse::Reversal: return "reversal";
    case ContactResponse::ActivePush: return "active_push";
  }
  return "unknown";
}

std::string_view to_string(DecisionKind k) {
  switch (k) {
    case DecisionKind::TripStart: return "trip_start";
    case DecisionKind::Rest: return "rest";
    case DecisionKind::Reversal: return "reversal";
    case DecisionKind::PassiveManeuver: return "passive_maneuver";
    case DecisionKind::ActivePush: return "active_push";
    case DecisionKind::PushFallback: return "push_fallback";
    case DecisionKind::GiveUp: return "give_up";
    case DecisionKind::PelletAcquired: return "pellet_acquired";
    case DecisionKind::Deposit: return "deposit";
    case DecisionKind::TripFailed: return "trip_failed";
  }
  return "unknown";
}

void ControllerParams::validate() const {
  auto fail = [](const char* field, double value, const char* range) {
    std::ostringstream os;
    os << field << " = " << value << " is outside its valid range " << range;
    throw ConfigError(os.str());
  };
  auto positive = [&](const char* field, double v) {
    if (!(v > 0.0)) fail(field, v, "(0, inf)");
  };
  if (!(p_r >= 0.0 && p_r <= 1.0)) fail("p_r", p_r, "[0, 1]");
  if (!(initial_p_e >= 0.0 && initial_p_e <= 1.0)) fail("initial_p_e", initial_p_e, "[0, 1]");
  if (!(delta_r > 0.0 && delta_r <= 1.0)) fail("delta_r", delta_r, "(0, 1]");
  positive("t_give_up_s", t_give_up);
  positive("t_rest_s", t_rest);
  positive("dt_s", dt);
  positive("v_max", v_max);
  positive("omega_max", omega_max);
  positive("lookahead_cm", lookahead);
  positive("heading_gain", heading_gain);
  positive("turn_in_place_rad", turn_in_place);
  positive("dig_creep_speed", dig_creep_speed);
  positive("backup_distance_cm", backup_distance);
  if (!(response_delay >= 0.0)) fail("response_delay_s", response_delay, "[0, inf)");
  if (!(turn_min >= 0.0 && turn_min <= turn_max)) fail("turn_min_deg", rad_to_deg(turn_min), "[0, turn_max_deg]");
  if (!(turn_max <= std::numbers::pi)) fail("turn_max_deg", rad_to_deg(turn_max), "[turn_min_deg, 180]");
  if (!(escape_distance >= 0.0)) fail("escape_distance_cm", escape_distance, "[0, inf)");
  positive("push_speed", push_speed);
  positive("push_burst_s", push_burst);
  if (!(push_progress >= 0.0)) fail("push_progress_cm", push_progress, "[0, inf)");
  if (push_speed > v_max) fail("push_speed", push_speed, "(0, v_max]");
  if (dig_creep_speed > v_max) fail("dig_creep_speed", dig_creep_speed, "(0, v_max]");
}

TripDecision begin_trip(ControllerState& state, double clock, Rng& rng) {
  state.state_entry_time = clock;
  state.maneuver = Maneuver::None;
  if (rng.uniform() < state.p_e) {
    state.fsm = FsmState::GoingToDig;
    state.trip_start_time = clock;
    state.carrying_pellet = false;
    state.active_push_deadline.reset();
    return TripDecision::EnterTunnel;
  }
  state.fsm = FsmState::Resting;
  return TripDecision::Rest;
}

ContactResponse on_contact(const ControllerState& state, const ControllerParams& params,
                           ContactType sensed, double r_c, double clock, Rng& rng) {
  const FsmState phase = state.phase();
  if (phase == FsmState::Resting) {
    throw std::logic_error("contact delivered to a resting robot");
  }
  if (sensed == ContactType::Wall) return ContactResponse::PassiveManeuver;
  if (state.active_push_deadline && clock > *state.active_push_deadline) {
    return ContactResponse::PassiveManeuver;
  }
  if (phase == FsmState::GoingToDig) {
    const double q = rng.uniform();
    const bool give_up = params.reversal_above ? q > params.p_r : q < params.p_r;
    return give_up ? ContactResponse::Reversal : ContactResponse::PassiveManeuver;
  }
  if (params.mode == Mode::Baseline) return ContactResponse::PassiveManeuver;
  return rng.uniform() < r_c ? ContactResponse::ActivePush : ContactResponse::PassiveManeuver;
}

void on_trip_end(ControllerState& state, const ControllerParams& params, bool success) {
  state.pending_response.reset();
  const double step = success ? params.delta_r : -params.delta_r;
  state.p_e = std::clamp(state.p_e + step, 0.0, 1.0);
  // Snap accumulated round-off so repeated steps land exactly on the bounds.
  if (std::abs(state.p_e) < 1e-9) state.p_e = 0.0;
  if (std::abs(state.p_e - 1.0) < 1e-9) state.p_e = 1.0;
  state.k += 1;
  state.carrying_pellet = false;
  state.active_push_deadline.reset();
  state.maneuver = Maneuver::None;
  state.fsm = FsmState::Resting;
}

Controller::Controller(int id, ControllerParams params, MapParams map_params, ContactMap map,
                       Rng rng)
    : id_(id), params_(params), map_params_(map_params), map_(std::move(map)), rng_(rng) {
  state_.p_e = params_.initial_p_e;
  // A robot starts at home having just "finished" a rest, so the first tick
  // samples the entrance probability.
  state_.state_entry_time = -params_.t_rest;
}

void Controller::log(std::vector<DecisionEvent>& out, double t, DecisionKind k, double value) const {
  out.push_back({t, id_, k, value});
}

void Controller::start_trip_or_rest(double clock, std::vector<DecisionEvent>& out) {
  if (begin_trip(state_, clock, rng_) == TripDecision::EnterTunnel) {
    log(out, clock, DecisionKind::TripStart, state_.p_e);
  } else {
    stats_.rests++;
    log(out, clock, DecisionKind::Rest, state_.p_e);
  }
}

void Controller::give_up(double clock, std::vector<DecisionEvent>& out) {
  stats_.give_ups++;
  log(out, clock, DecisionKind::GiveUp);
  state_.pending_response.reset();
  state_.fsm = FsmState::GoingHome;
  state_.state_entry_time = clock;
  state_.maneuver = Maneuver::None;
}

void Controller::enter_collision(Maneuver m, double clock) {
  if (state_.fsm != FsmState::Collision) {
    state_.resume = state_.fsm;
    state_.fsm = FsmState::Collision;
  }
  state_.maneuver = m;
  state_.maneuver_start_time = clock;
}

void Controller::respond(const Observation& obs, std::vector<DecisionEvent>& out) {
  const double t = obs.clock;
  if (!state_.pending_response) {
    const SensedContact* chosen = nullptr;
    for (const SensedContact& c : obs.contacts) {
      if (!c.onset) continue;
      if (c.sensed == ContactType::Robot) {
        chosen = &c;
        break;
      }
      if (chosen == nullptr) chosen = &c;
    }
    if (chosen == nullptr) return;

    const double r_c = map_.faulty_likelihood(map_params_, obs.position_estimate);
    const ContactResponse response = on_contact(state_, params_, chosen->sensed, r_c, t, rng_);
    switch (response) {
      case ContactResponse::Reversal:
        stats_.reversals++;
        log(out, t, DecisionKind::Reversal, r_c);
        break;
      case ContactResponse::PassiveManeuver:
        stats_.passive_maneuvers++;
        log(out, t, DecisionKind::PassiveManeuver, r_c);
        break;
      case ContactResponse::ActivePush:
        // Logged when executed; the push may still be refused.
        break;
    }
    state_.pending_response = response;
    state_.pending_since = t;
    state_.pending_likelihood = r_c;
  }
  if (t - state_.pending_since + 1e-9 < params_.response_delay) return;
  const ContactResponse response = *state_.pending_response;
  state_.pending_response.reset();
  execute(response, obs, out);
}

void Controller::execute(ContactResponse response, const Observation& obs, std::vector<DecisionEvent>& out) {
  const double t = obs.clock;
  const bool delayed = params_.response_delay > 0.0;
  const SensedContact* robot_touch = nullptr;
  for (const SensedContact& c : obs.contacts) {
    if (c.sensed == ContactType::Robot) {
      robot_touch = &c;
      break;
    }
  }
  switch (response) {
    case ContactResponse::Reversal:
      state_.fsm = FsmState::GoingHome;
      state_.state_entry_time = t;
      state_.maneuver = Maneuver::None;
      break;
    case ContactResponse::PassiveManeuver:
      // A contact that cleared during the reaction delay needs no maneuver.
      if (delayed && obs.contacts.empty()) break;
      enter_collision(Maneuver::BackUp, t);
      break;
    case ContactResponse::ActivePush:
      if (robot_touch == nullptr) {
        if (delayed) break;
        robot_touch = &obs.contacts.front();
      }
      // Only push toward home; a push deeper into the tunnel falls back to a back-up.
      if (robot_touch->bearing.x >= 0.0) {
        stats_.passive_maneuvers++;
        log(out, t, DecisionKind::PassiveManeuver, state_.pending_likelihood);
        enter_collision(Maneuver::BackUp, t);
        break;
      }
      stats_.active_pushes++;
      log(out, t, DecisionKind::ActivePush, state_.pending_likelihood);
      if (!state_.active_push_deadline) state_.active_push_deadline = t + params_.t_give_up;
      state_.push_direction = robot_touch->bearing;
      state_.burst_start = obs.odometry;
      enter_collision(Maneuver::Push, t);
      break;
  }
}

MotorCommand Controller::steer_heading(const Pose& pose, double heading, double speed) const {
  const double err = wrap_angle(heading - pose.theta);
  if (std::abs(err) > params_.turn_in_place) {
    return {0.0, std::copysign(params_.omega_max, err)};
  }
  return {speed, std::clamp(params_.heading_gain * err, -params_.omega_max, params_.omega_max)};
}

MotorCommand Controller::steer_to(const Pose& pose, Vec2 target) const {
  const Vec2 d = target - pose.position();
  return steer_heading(pose, std::atan2(d.y, d.x), params_.v_max);
}

MotorCommand Controller::run_maneuver(const Observation& obs, std::vector<DecisionEvent>& out) {
  const double t = obs.clock;
  const Pose& pose = obs.odometry;
  const double elapsed = t - state_.maneuver_start_time;
  auto finish = [&] {
    state_.fsm = state_.resume;
    state_.maneuver = Maneuver::None;
  };

  switch (state_.maneuver) {
    case Maneuver::BackUp: {
      if (elapsed + 1e-9 < params_.backup_distance / params_.v_max) return {-params_.v_max, 0.0};
      const double magnitude = rng_.uniform(params_.turn_min, params_.turn_max);
      const double sign = rng_.uniform() < 0.5 ? -1.0 : 1.0;
      state_.turn_target = wrap_angle(pose.theta + sign * magnitude);
      state_.maneuver = Maneuver::Turn;
      state_.maneuver_start_time = t;
      [[fallthrough]];
    }
    case Maneuver::Turn: {
      const double err = wrap_angle(state_.turn_target - pose.theta);
      if (std::abs(err) > 1e-6) {
        return {0.0, std::clamp(err / params_.dt, -params_.omega_max, params_.omega_max)};
      }
      if (params_.escape_distance <= 0.0) {
        finish();
        return {};
      }
      state_.maneuver = Maneuver::Escape;
      state_.maneuver_start_time = t;
      [[fallthrough]];
    }
    case Maneuver::Escape: {
      if (t - state_.maneuver_start_time + 1e-9 < params_.escape_distance / params_.v_max) {
        return {params_.v_max, 0.0};
      }
      finish();
      return {};
    }
    case Maneuver::Push: {
      if (elapsed + 1e-9 >= params_.push_burst) {
        const double progress = dot(pose.position() - state_.burst_start.position(), state_.push_direction);
        if (progress >= params_.push_progress) state_.active_push_deadline = t + params_.t_give_up;
        const SensedContact* touching = nullptr;
        for (const SensedContact& c : obs.contacts) {
          if (c.sensed == ContactType::Robot) {
            touching = &c;
            break;
          }
        }
        if (touching == nullptr) {
          state_.active_push_deadline.reset();
          finish();
          return {};
        }
        if (state_.active_push_deadline && t > *state_.active_push_deadline) {
          stats_.push_fallbacks++;
          log(out, t, DecisionKind::PushFallback);
          state_.maneuver = Maneuver::BackUp;
          state_.maneuver_start_time = t;
          return {-params_.v_max, 0.0};
        }
        state_.push_direction = touching->bearing;
        state_.burst_start = pose;
        state_.maneuver_start_time = t;
      }
      const double heading = std::atan2(state_.push_direction.y, state_.push_direction.x);
      return steer_heading(pose, heading, params_.push_speed);
    }
    case Maneuver::None: break;
  }
  finish();
  return {};
}

MotorCommand Controller::tick(const Observation& obs, std::vector<DecisionEvent>& out) {
  const double t = obs.clock;

  if (state_.fsm != FsmState::Resting) {
    if (t - state_.last_decay_time > map_params_.decay_interval) {
      map_.decay(map_params_.beta);
      state_.last_decay_time = t;
    }
    for (const SensedContact& c : obs.contacts) {
      if (!c.onset) continue;
      map_.record_contact(map_params_, c.sensed, obs.position_estimate);
      (c.sensed == ContactType::Robot ? stats_.robot_contacts : stats_.wall_contacts)++;
    }
  }

  const FsmState phase = state_.phase();
  if (phase == FsmState::GoingHome && (obs.pellet_deposited || (!state_.carrying_pellet && obs.in_home))) {
    const bool success = state_.carrying_pellet && obs.pellet_deposited;
    on_trip_end(state_, params_, success);
    stats_.trips++;
    if (success) stats_.successes++;
    log(out, t, success ? DecisionKind::Deposit : DecisionKind::TripFailed, state_.p_e);
    start_trip_or_rest(t, out);
  } else if (phase == FsmState::GoingToDig && t - state_.trip_start_time > params_.t_give_up) {
    give_up(t, out);
  } else if (phase == FsmState::Digging && obs.pellet_acquired) {
    log(out, t, DecisionKind::PelletAcquired);
    state_.pending_response.reset();
    state_.carrying_pellet = true;
    state_.fsm = FsmState::GoingHome;
    state_.state_entry_time = t;
    state_.maneuver = Maneuver::None;
  }

  if (state_.fsm == FsmState::GoingToDig || state_.fsm == FsmState::Digging ||
      state_.fsm == FsmState::GoingHome) {
    respond(obs, out);
  }

  const Pose& pose = obs.odometry;
  // A maneuver can hand back to Digging, which can fall back to GoingToDig,
  // which can give up; each hop is one pass through the switch.
  for (int pass = 0; pass < 4; ++pass) {
    switch (state_.fsm) {
      case FsmState::Resting:
        if (t - state_.state_entry_time + 1e-9 >= params_.t_rest) {
          if (started_) state_.k += 1;
          started_ = true;
          start_trip_or_rest(t, out);
          if (state_.fsm != FsmState::Resting) continue;
        }
        return {};
      case FsmState::GoingToDig:
        // Re-entering from Digging or a maneuver after the deadline.
        if (t - state_.trip_start_time > params_.t_give_up) {
          give_up(t, out);
          continue;
        }
        if (obs.in_dig_zone) {
          state_.fsm = FsmState::Digging;
          state_.state_entry_time = t;
          continue;
        }
        return steer_to(pose, {pose.x + params_.lookahead, params_.lane_dig_y});
      case FsmState::Digging:
        if (!obs.in_dig_zone) {
          state_.fsm = FsmState::GoingToDig;
          state_.state_entry_time = t;
          continue;
        }
        if (obs.at_dig_face) return {};
        return steer_heading(pose, 0.0, params_.dig_creep_speed);
      case FsmState::GoingHome:
        return steer_to(pose, {pose.x - params_.lookahead, params_.lane_home_y});
      case FsmState::Collision: {
        const MotorCommand cmd = run_maneuver(obs, out);
        if (state_.fsm == FsmState::Collision) return cmd;
        continue;
      }
    }
  }
  return {};
}

}  // namespace excavsim
