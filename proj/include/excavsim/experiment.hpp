#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "excavsim/anova.hpp"
#include "excavsim/config.hpp"
#include "excavsim/controller.hpp"

namespace excavsim {

struct TrajectoryRow {
  double t = 0.0;
  int id = 0;
  Pose pose;
};

struct ContactLogRow {
  double t = 0.0;
  int robot = 0;
  int other = 0;
  ContactType true_type = ContactType::Wall;
  ContactType sensed = ContactType::Wall;
  double position_estimate = 0.0;
};

struct MapSnapshot {
  double t = 0.0;
  int robot = 0;
  std::vector<double> robot_channel;
  std::vector<double> wall_channel;
};

struct RobotSummary {
  int id = 0;
  ControllerStats stats;
  double final_p_e = 0.0;
  int final_k = 0;
  /// Longest time the robot was observed outbound (GoingToDig) in one trip.
  double max_outbound_time = 0.0;
};

struct TrialResult {
  Mode mode = Mode::Acr;
  std::uint64_t seed = 0;
  double duration = 0.0;
  double dt = 0.0;
  int n_active = 0;

  /// (t, cumulative pellets) at t = 0 and at every deposit.
  std::vector<std::pair<double, int>> deposits;
  /// Cumulative pellets at every sampling instant.
  std::vector<std::pair<double, int>> pellet_curve;
  std::vector<TrajectoryRow> trajectories;
  std::vector<DecisionEvent> decisions;
  std::vector<ContactLogRow> contacts;
  std::vector<MapSnapshot> maps;
  std::vector<RobotSummary> robots;

  std::optional<Pose> initial_faulty;
  std::optional<Pose> final_faulty;
  std::optional<double> obstruction;
  std::vector<Pose> final_poses;
  int nonconverged_steps = 0;

  int final_pellets() const { return deposits.empty() ? 0 : deposits.back().second; }
  int total_active_pushes() const;
};

/// Obstruction caused by a stationary body: a weighted mix of how deep it
/// sits (x / L) and how far it is from tunnel-parallel (|sin theta|).
double obstruction_index(const Pose& pose, const Tunnel& tunnel, double weight_x = 0.5,
                         double weight_theta = 0.5);

/// Runs one trial to completion. Deterministic in (config, seed).
TrialResult run_trial(const TrialConfig& config);

/// Per-trial excavation rates (deposits per minute) used as the ANOVA group
/// for the within-mode consistency check.
std::vector<double> deposits_per_minute(const TrialResult& result);

struct ModeSummary {
  Mode mode = Mode::Acr;
  int n_trials = 0;
  double mean_pellets = 0.0;
  double std_pellets = 0.0;
  double mean_obstruction = 0.0;
  double std_obstruction = 0.0;
  double median_faulty_x = 0.0;
  double mean_faulty_abs_sin_theta = 0.0;
  double mean_active_pushes = 0.0;
  double mean_reversals = 0.0;
  std::optional<AnovaResult> anova;
  std::string anova_error;
};

struct ComparisonSummary {
  std::vector<ModeSummary> modes;
  /// Mean ACR pellets over mean baseline pellets, when both modes ran.
  std::optional<double> acr_baseline_ratio;
  /// Ordered by mode (as requested) then seed.
  std::vector<TrialResult> trials;

  const ModeSummary* find(Mode m) const;
};

/// Runs `n_trials` seeds starting at `seed_base` for each mode, on up to
/// `jobs` threads, and aggregates.
ComparisonSummary compare(const TrialConfig& base, std::span<const Mode> modes, int n_trials,
                          std::uint64_t seed_base, int jobs = 1);

/// Aggregation over results of one mode, exposed for tests and tools.
ModeSummary summarize(Mode mode, std::span<const TrialResult> trials);

double median(std::vector<double> values);

}  // namespace excavsim
