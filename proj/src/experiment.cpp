#include "excavsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <thread>

#include "excavsim/sensing.hpp"

namespace excavsim {

namespace {

constexpr std::uint64_t kControllerStream = 1;
constexpr std::uint64_t kSensorStream = 2;

std::vector<RobotBody> initial_bodies(const TrialConfig& c) {
  const GeometryParams& g = c.geometry;
  std::vector<RobotBody> bodies;
  const double x = g.tunnel.home_x / 2.0;
  const double margin = g.robot_radius + 1.0;
  for (int i = 0; i < c.n_active; ++i) {
    RobotBody b;
    b.shape.half_segment = g.half_segment();
    b.shape.radius = g.robot_radius;
    double y = c.controller.lane_dig_y;
    if (c.n_active > 1) {
      y = margin + (g.tunnel.width - 2.0 * margin) * i / (c.n_active - 1);
    }
    b.shape.pose = {x, y, 0.0};
    bodies.push_back(b);
  }
  for (int i = 0; i < g.n_faulty; ++i) {
    RobotBody b;
    b.kind = BodyKind::Faulty;
    b.shape.half_segment = g.half_segment();
    b.shape.radius = g.robot_radius;
    b.shape.pose = {g.faulty_x, g.faulty_y_or_center(), wrap_angle(deg_to_rad(g.faulty_theta_deg))};
    bodies.push_back(b);
  }
  return bodies;
}

struct Sampler {
  double interval;
  long next = 0;
  bool due(double t) const { return t + 1e-9 >= static_cast<double>(next) * interval; }
};

}  // namespace

int TrialResult::total_active_pushes() const {
  int n = 0;
  for (const RobotSummary& r : robots) n += r.stats.active_pushes;
  return n;
}

double obstruction_index(const Pose& pose, const Tunnel& tunnel, double weight_x, double weight_theta) {
  const double depth = std::clamp(pose.x / tunnel.length, 0.0, 1.0);
  return weight_x * depth + weight_theta * std::abs(std::sin(pose.theta));
}

TrialResult run_trial(const TrialConfig& config) {
  TrialConfig cfg = config;
  cfg.resolve();
  cfg.validate();
  const GeometryParams& g = cfg.geometry;
  const Tunnel& tunnel = g.tunnel;
  const double dt = cfg.controller.dt;

  World world(tunnel, cfg.world, initial_bodies(cfg));
  const auto n_active = static_cast<std::size_t>(cfg.n_active);

  std::vector<Controller> controllers;
  std::vector<Rng> sensor_rngs;
  controllers.reserve(n_active);
  for (std::size_t i = 0; i < n_active; ++i) {
    const std::uint64_t base = 16 * i;
    controllers.emplace_back(static_cast<int>(i), cfg.controller, cfg.map,
                             ContactMap(g.n_bins(), g.bin_width),
                             Rng::substream(cfg.seed, base + kControllerStream));
    sensor_rngs.push_back(Rng::substream(cfg.seed, base + kSensorStream));
  }

  TrialResult result;
  result.mode = cfg.mode;
  result.seed = cfg.seed;
  result.duration = cfg.duration;
  result.dt = dt;
  result.n_active = cfg.n_active;
  result.deposits.emplace_back(0.0, 0);
  result.robots.resize(n_active);
  for (std::size_t i = 0; i < n_active; ++i) result.robots[i].id = static_cast<int>(i);
  const std::size_t faulty_index = n_active;
  if (g.n_faulty > 0) result.initial_faulty = world.body(faulty_index).pose();

  std::vector<DwellClock> dwell(n_active);
  std::vector<bool> acquired(n_active, false);
  std::vector<bool> deposited(n_active, false);
  std::vector<std::map<int, ContactType>> labels(n_active);
  std::vector<std::vector<SensedContact>> sensed(n_active);
  std::vector<MotorCommand> commands(world.size());
  int pellets = 0;

  Sampler traj{cfg.experiment.sample_interval};
  Sampler snap{cfg.experiment.map_snapshot_interval};
  auto sample = [&](double t) {
    if (traj.due(t)) {
      for (std::size_t i = 0; i < world.size(); ++i) {
        result.trajectories.push_back({t, static_cast<int>(i), world.body(i).pose()});
      }
      result.pellet_curve.emplace_back(t, pellets);
      traj.next++;
    }
    if (snap.due(t)) {
      for (const Controller& c : controllers) {
        const ContactMap& m = c.map();
        result.maps.push_back({t, c.id(), {m.robot_channel().begin(), m.robot_channel().end()},
                               {m.wall_channel().begin(), m.wall_channel().end()}});
      }
      snap.next++;
    }
  };

  const auto n_steps = static_cast<long>(std::llround(cfg.duration / dt));
  for (long step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    sample(t);

    for (std::size_t i = 0; i < n_active; ++i) {
      const RobotBody& body = world.body(i);
      Observation obs;
      obs.clock = t;
      obs.odometry = body.pose();
      obs.position_estimate = estimate_position(body.pose().x, tunnel.length, cfg.sensing, sensor_rngs[i]);
      obs.in_dig_zone = detect_dig_zone(body.pose(), body.shape.half_length(), tunnel.dig_x, cfg.sensing);
      obs.at_dig_face = tunnel.in_dig(body.pose().x + body.shape.half_length() * std::cos(body.pose().theta));
      obs.in_home = tunnel.in_home(body.pose().position());
      obs.pellet_acquired = acquired[i];
      obs.pellet_deposited = deposited[i];
      obs.contacts = sensed[i];

      Controller& ctl = controllers[i];
      commands[i] = ctl.tick(obs, result.decisions);
      const ControllerState& st = ctl.state();
      world.set_collidable(i, st.fsm != FsmState::Resting);
      if (st.phase() == FsmState::GoingToDig) {
        RobotSummary& rs = result.robots[i];
        rs.max_outbound_time = std::max(rs.max_outbound_time, t - st.trip_start_time);
      }
    }

    const StepReport report = world.step(commands, dt, t + dt);
    if (!report.converged) result.nonconverged_steps++;

    for (auto& s : sensed) s.clear();
    std::vector<std::map<int, ContactType>> still(n_active);
    for (const ContactEvent& e : report.contacts) {
      const auto i = static_cast<std::size_t>(e.robot);
      auto known = labels[i].find(e.other);
      ContactType label;
      if (e.onset || known == labels[i].end()) {
        label = classify_contact(e.true_type, cfg.sensing, sensor_rngs[i]);
      } else {
        label = known->second;
      }
      still[i][e.other] = label;
      sensed[i].push_back({label, e.normal, e.bearing, e.onset});
      if (e.onset) {
        result.contacts.push_back({e.time, e.robot, e.other, e.true_type, label,
                                   std::clamp(world.body(i).pose().x, 0.0, tunnel.length)});
      }
    }
    labels = std::move(still);

    for (std::size_t i = 0; i < n_active; ++i) {
      const Controller& ctl = controllers[i];
      const PelletOutcome outcome = pellet_interaction(tunnel, world.body(i), ctl.digging(), ctl.carrying(),
                                                       g.dig_time, dt, dwell[i]);
      acquired[i] = outcome == PelletOutcome::Acquired;
      deposited[i] = outcome == PelletOutcome::Deposited;
      if (deposited[i]) {
        pellets++;
        result.deposits.emplace_back(t + dt, pellets);
      }
    }
  }
  sample(static_cast<double>(n_steps) * dt);

  for (std::size_t i = 0; i < n_active; ++i) {
    RobotSummary& rs = result.robots[i];
    rs.stats = controllers[i].stats();
    rs.final_p_e = controllers[i].state().p_e;
    rs.final_k = controllers[i].state().k;
  }
  for (std::size_t i = 0; i < world.size(); ++i) result.final_poses.push_back(world.body(i).pose());
  if (g.n_faulty > 0) {
    result.final_faulty = world.body(faulty_index).pose();
    result.obstruction = obstruction_index(*result.final_faulty, tunnel, cfg.experiment.obstruction_weight_x,
                                           cfg.experiment.obstruction_weight_theta);
  }
  return result;
}

std::vector<double> deposits_per_minute(const TrialResult& result) {
  const auto minutes = static_cast<std::size_t>(std::max(1.0, std::floor(result.duration / 60.0)));
  std::vector<double> rate(minutes, 0.0);
  for (std::size_t i = 1; i < result.deposits.size(); ++i) {
    const auto m = static_cast<std::size_t>(result.deposits[i].first / 60.0);
    if (m < minutes) rate[m] += 1.0;
  }
  return rate;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

ModeSummary summarize(Mode mode, std::span<const TrialResult> trials) {
  ModeSummary s;
  s.mode = mode;
  s.n_trials = static_cast<int>(trials.size());
  std::vector<double> pellets, obstruction, faulty_x, sin_theta, pushes, reversals;
  std::vector<std::vector<double>> rates;
  for (const TrialResult& r : trials) {
    pellets.push_back(r.final_pellets());
    pushes.push_back(r.total_active_pushes());
    int rev = 0;
    for (const RobotSummary& rs : r.robots) rev += rs.stats.reversals;
    reversals.push_back(rev);
    if (r.final_faulty) {
      obstruction.push_back(*r.obstruction);
      faulty_x.push_back(r.final_faulty->x);
      sin_theta.push_back(std::abs(std::sin(r.final_faulty->theta)));
    }
    rates.push_back(deposits_per_minute(r));
  }
  std::tie(s.mean_pellets, s.std_pellets) = mean_std(pellets);
  std::tie(s.mean_obstruction, s.std_obstruction) = mean_std(obstruction);
  s.median_faulty_x = median(faulty_x);
  s.mean_faulty_abs_sin_theta = mean_std(sin_theta).first;
  s.mean_active_pushes = mean_std(pushes).first;
  s.mean_reversals = mean_std(reversals).first;
  try {
    s.anova = one_way_anova(rates);
  } catch (const std::exception& e) {
    s.anova_error = e.what();
  }
  return s;
}

const ModeSummary* ComparisonSummary::find(Mode m) const {
  for (const ModeSummary& s : modes) {
    if (s.mode == m) return &s;
  }
  return nullptr;
}

ComparisonSummary compare(const TrialConfig& base, std::span<const Mode> modes, int n_trials,
                          std::uint64_t seed_base, int jobs) {
  if (n_trials < 2) throw ConfigError("trials = " + std::to_string(n_trials) + " must be at least 2");
  std::vector<TrialConfig> tasks;
  for (Mode m : modes) {
    for (int i = 0; i < n_trials; ++i) {
      TrialConfig c = base;
      c.mode = m;
      c.seed = seed_base + static_cast<std::uint64_t>(i);
      c.resolve();
      c.validate();
      tasks.push_back(c);
    }
  }

  ComparisonSummary out;
  out.trials.resize(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        out.trials[i] = run_trial(tasks[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, static_cast<int>(tasks.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto first = static_cast<std::ptrdiff_t>(m) * n_trials;
    out.modes.push_back(summarize(modes[m], std::span(out.trials).subspan(first, n_trials)));
  }
  const ModeSummary* acr = out.find(Mode::Acr);
  const ModeSummary* baseline = out.find(Mode::Baseline);
  if (acr && baseline && baseline->mean_pellets > 0.0) {
    out.acr_baseline_ratio = acr->mean_pellets / baseline->mean_pellets;
  }
  return out;
}

}  // namespace excavsim
