#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "excavsim/controller.hpp"

using namespace excavsim;

namespace {

ControllerState in_phase(FsmState phase) {
  ControllerState s;
  s.fsm = phase;
  return s;
}

Controller make_controller(ControllerParams p, std::uint64_t seed = 1) {
  return Controller(0, p, MapParams{}, ContactMap(30, 10.0), Rng(seed));
}

Observation at(double clock, double x) {
  Observation o;
  o.clock = clock;
  o.odometry = {x, 35.0, 0.0};
  o.position_estimate = x;
  return o;
}

SensedContact robot_contact(Vec2 bearing = {1.0, 0.0}) {
  return {ContactType::Robot, bearing, bearing, true};
}

int count(const std::vector<DecisionEvent>& log, DecisionKind kind) {
  int n = 0;
  for (const DecisionEvent& e : log) n += e.kind == kind;
  return n;
}

}  // namespace

TEST(BeginTrip, EntranceProbabilityExtremes) {
  Rng rng(1);
  ControllerState s;
  s.p_e = 1.0;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(begin_trip(s, 0.0, rng), TripDecision::EnterTunnel);
  EXPECT_EQ(s.fsm, FsmState::GoingToDig);
  s.p_e = 0.0;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(begin_trip(s, 5.0, rng), TripDecision::Rest);
  EXPECT_EQ(s.fsm, FsmState::Resting);
  EXPECT_EQ(s.state_entry_time, 5.0);
}

TEST(BeginTrip, EntranceFrequency) {
  Rng rng(9);
  ControllerState s;
  s.p_e = 0.3;
  const int n = 10000;
  int entered = 0;
  for (int i = 0; i < n; ++i) entered += begin_trip(s, 0.0, rng) == TripDecision::EnterTunnel;
  EXPECT_NEAR(static_cast<double>(entered) / n, 0.3, 3.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST(OnContact, EnRouteReversalFrequency) {
  ControllerParams p;
  Rng rng(2025);
  const ControllerState s = in_phase(FsmState::GoingToDig);
  const int n = 10000;
  int reversals = 0;
  for (int i = 0; i < n; ++i) {
    const ContactResponse r = on_contact(s, p, ContactType::Robot, 0.9, 0.0, rng);
    ASSERT_NE(r, ContactResponse::ActivePush);
    reversals += r == ContactResponse::Reversal;
  }
  EXPECT_NEAR(static_cast<double>(reversals) / n, 0.64, 0.02);
}

TEST(OnContact, ReversalAboveInvertsTheTest) {
  ControllerParams p;
  p.reversal_above = true;
  Rng rng(3);
  const ControllerState s = in_phase(FsmState::GoingToDig);
  const int n = 10000;
  int reversals = 0;
  for (int i = 0; i < n; ++i) reversals += on_contact(s, p, ContactType::Robot, 0.5, 0.0, rng) == ContactResponse::Reversal;
  EXPECT_NEAR(static_cast<double>(reversals) / n, 0.36, 0.02);
}

TEST(OnContact, WallContactsArePassive) {
  ControllerParams p;
  Rng rng(4);
  for (FsmState phase : {FsmState::GoingToDig, FsmState::Digging, FsmState::GoingHome}) {
    for (int i = 0; i < 200; ++i) {
      EXPECT_EQ(on_contact(in_phase(phase), p, ContactType::Wall, 1.0, 0.0, rng), ContactResponse::PassiveManeuver);
    }
  }
}

TEST(OnContact, HomeboundPushFollowsLikelihood) {
  ControllerParams p;
  Rng rng(5);
  const ControllerState s = in_phase(FsmState::GoingHome);
  EXPECT_EQ(on_contact(s, p, ContactType::Robot, 1.0, 0.0, rng), ContactResponse::ActivePush);
  EXPECT_EQ(on_contact(s, p, ContactType::Robot, 0.0, 0.0, rng), ContactResponse::PassiveManeuver);
  const int n = 10000;
  int pushes = 0;
  for (int i = 0; i < n; ++i) pushes += on_contact(s, p, ContactType::Robot, 0.25, 0.0, rng) == ContactResponse::ActivePush;
  EXPECT_NEAR(static_cast<double>(pushes) / n, 0.25, 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST(OnContact, BaselineNeverPushes) {
  ControllerParams p;
  p.mode = Mode::Baseline;
  Rng rng(6);
  for (FsmState phase : {FsmState::GoingToDig, FsmState::Digging, FsmState::GoingHome}) {
    for (int i = 0; i < 1000; ++i) {
      EXPECT_NE(on_contact(in_phase(phase), p, ContactType::Robot, 1.0, 0.0, rng), ContactResponse::ActivePush);
    }
  }
}

TEST(OnContact, ExpiredPushDeadlineFallsBack) {
  ControllerParams p;
  Rng rng(7);
  ControllerState s = in_phase(FsmState::GoingHome);
  s.active_push_deadline = 10.0;
  EXPECT_EQ(on_contact(s, p, ContactType::Robot, 1.0, 10.5, rng), ContactResponse::PassiveManeuver);
  EXPECT_EQ(on_contact(s, p, ContactType::Robot, 1.0, 9.5, rng), ContactResponse::ActivePush);
}

TEST(OnContact, RestingRobotRejectsContacts) {
  ControllerParams p;
  Rng rng(8);
  EXPECT_THROW(on_contact(in_phase(FsmState::Resting), p, ContactType::Robot, 0.5, 0.0, rng), std::logic_error);
}

TEST(TripEnd, EntranceProbabilityStaysInBounds) {
  ControllerParams p;
  ControllerState s;
  s.p_e = 1.0;
  on_trip_end(s, p, true);
  EXPECT_EQ(s.p_e, 1.0);
  for (int i = 0; i < 10; ++i) on_trip_end(s, p, false);
  EXPECT_EQ(s.p_e, 0.0);
  on_trip_end(s, p, false);
  EXPECT_EQ(s.p_e, 0.0);
  for (int i = 0; i < 10; ++i) on_trip_end(s, p, true);
  EXPECT_EQ(s.p_e, 1.0);
  EXPECT_EQ(s.k, 1 + 22);
  EXPECT_EQ(s.fsm, FsmState::Resting);
}

TEST(TripEnd, AdversarialSequences) {
  ControllerParams p;
  p.delta_r = 0.37;
  Rng rng(10);
  ControllerState s;
  for (int i = 0; i < 10000; ++i) {
    on_trip_end(s, p, rng.uniform() < 0.5);
    ASSERT_GE(s.p_e, 0.0);
    ASSERT_LE(s.p_e, 1.0);
  }
}

TEST(Controller, FirstTickStartsTrip) {
  ControllerParams p;
  Controller c = make_controller(p);
  std::vector<DecisionEvent> log;
  const MotorCommand cmd = c.tick(at(0.0, 20.0), log);
  EXPECT_EQ(c.state().fsm, FsmState::GoingToDig);
  EXPECT_EQ(count(log, DecisionKind::TripStart), 1);
  EXPECT_GT(cmd.linear, 0.0);
}

TEST(Controller, GivesUpAfterTimeout) {
  ControllerParams p;
  Controller c = make_controller(p);
  std::vector<DecisionEvent> log;
  double t = 0.0;
  for (; t <= p.t_give_up + 0.5; t += p.dt) {
    c.tick(at(t, 100.0), log);
    if (c.state().fsm == FsmState::GoingHome) break;
  }
  EXPECT_EQ(c.state().fsm, FsmState::GoingHome);
  EXPECT_EQ(count(log, DecisionKind::GiveUp), 1);
  EXPECT_LE(t, p.t_give_up + p.dt + 1e-9);
  EXPECT_GT(t, p.t_give_up);
}

TEST(Controller, ReversalExecutesAfterDelay) {
  ControllerParams p;
  p.p_r = 1.0;
  p.response_delay = 1.0;
  Controller c = make_controller(p);
  std::vector<DecisionEvent> log;
  c.tick(at(0.0, 100.0), log);
  Observation o = at(0.05, 100.0);
  o.contacts.push_back(robot_contact());
  c.tick(o, log);
  EXPECT_EQ(count(log, DecisionKind::Reversal), 1);
  EXPECT_EQ(c.state().fsm, FsmState::GoingToDig);
  double t = 0.05;
  while (c.state().fsm == FsmState::GoingToDig && t < 5.0) {
    t += p.dt;
    c.tick(at(t, 100.0), log);
  }
  EXPECT_EQ(c.state().fsm, FsmState::GoingHome);
  EXPECT_NEAR(t, 1.05, 1e-9);
  EXPECT_EQ(c.stats().reversals, 1);
}

TEST(Controller, PassiveManeuverBacksUpThenTurns) {
  ControllerParams p;
  p.p_r = 0.0;
  p.response_delay = 0.0;
  Controller c = make_controller(p);
  std::vector<DecisionEvent> log;
  c.tick(at(0.0, 100.0), log);
  Observation o = at(0.05, 100.0);
  o.contacts.push_back(robot_contact());
  const MotorCommand back = c.tick(o, log);
  EXPECT_EQ(c.state().fsm, FsmState::Collision);
  EXPECT_EQ(c.state().maneuver, Maneuver::BackUp);
  EXPECT_LT(back.linear, 0.0);
  double t = 0.05;
  for (int i = 0; i < 40 && c.state().maneuver == Maneuver::BackUp; ++i) {
    t += p.dt;
    c.tick(at(t, 100.0), log);
  }
  EXPECT_EQ(c.state().maneuver, Maneuver::Turn);
  const double target = c.state().turn_target;
  const double magnitude = std::abs(wrap_angle(target));
  EXPECT_GE(magnitude, p.turn_min - 1e-9);
  EXPECT_LE(magnitude, p.turn_max + 1e-9);
}

TEST(Controller, HomeboundPushAimsAlongBearing) {
  ControllerParams p;
  p.response_delay = 0.0;
  Controller c = make_controller(p);
  // A map full of robot contacts makes the faulty likelihood ~1.
  ContactMap& map = const_cast<ContactMap&>(c.map());
  for (double& v : map.robot_channel()) v = 50.0;
  std::vector<DecisionEvent> log;
  c.tick(at(0.0, 100.0), log);
  c.state().fsm = FsmState::GoingHome;
  Observation o = at(0.05, 100.0);
  o.contacts.push_back(robot_contact({-0.8, 0.6}));
  c.tick(o, log);
  EXPECT_EQ(count(log, DecisionKind::ActivePush), 1);
  EXPECT_EQ(c.state().maneuver, Maneuver::Push);
  EXPECT_NEAR(c.state().push_direction.x, -0.8, 1e-12);
  ASSERT_TRUE(c.state().active_push_deadline.has_value());
  EXPECT_NEAR(*c.state().active_push_deadline, 0.05 + p.t_give_up, 1e-9);
}

TEST(Controller, PushIntoTunnelFallsBackToBackUp) {
  ControllerParams p;
  p.response_delay = 0.0;
  Controller c = make_controller(p);
  ContactMap& map = const_cast<ContactMap&>(c.map());
  for (double& v : map.robot_channel()) v = 50.0;
  std::vector<DecisionEvent> log;
  c.tick(at(0.0, 100.0), log);
  c.state().fsm = FsmState::GoingHome;
  Observation o = at(0.05, 100.0);
  o.contacts.push_back(robot_contact({1.0, 0.0}));
  c.tick(o, log);
  EXPECT_EQ(c.state().maneuver, Maneuver::BackUp);
}

TEST(Controller, DepositEndsTripSuccessfully) {
  ControllerParams p;
  Controller c = make_controller(p);
  std::vector<DecisionEvent> log;
  c.tick(at(0.0, 100.0), log);
  c.state().fsm = FsmState::GoingHome;
  c.state().carrying_pellet = true;
  Observation o = at(1.0, 30.0);
  o.in_home = true;
  o.pellet_deposited = true;
  c.tick(o, log);
  EXPECT_EQ(count(log, DecisionKind::Deposit), 1);
  EXPECT_EQ(c.stats().successes, 1);
  EXPECT_EQ(c.state().k, 2);
  EXPECT_FALSE(c.carrying());
}

TEST(Controller, ParamsValidation) {
  ControllerParams p;
  p.p_r = 1.2;
  EXPECT_THROW(p.validate(), ConfigError);
  p = ControllerParams{};
  p.turn_min = deg_to_rad(100.0);
  EXPECT_THROW(p.validate(), ConfigError);
  p = ControllerParams{};
  p.push_speed = 20.0;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_NO_THROW(ControllerParams{}.validate());
}
