#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "excavsim/contact_map.hpp"
#include "excavsim/controller.hpp"
#include "excavsim/sensing.hpp"
#include "excavsim/world.hpp"

namespace excavsim {

struct GeometryParams {
  Tunnel tunnel;
  double robot_length = 32.0;
  double robot_radius = 9.0;
  double dig_time = 10.0;  // s of anterior presence in the dig zone per pellet
  double bin_width = 10.0;
  /// Lateral positions of the outbound and homebound lanes as fractions of
  /// the width.
  double lane_dig_fraction = 0.4;
  double lane_home_fraction = 0.9;
  int n_faulty = 1;
  double faulty_x = 150.0;
  std::optional<double> faulty_y;  // centerline when unset
  double faulty_theta_deg = 90.0;
  bool enforce_two_abreast = true;

  double half_segment() const { return robot_length / 2.0 - robot_radius; }
  double faulty_y_or_center() const { return faulty_y.value_or(tunnel.width / 2.0); }
  std::size_t n_bins() const;
};

struct ExperimentParams {
  int trials_per_mode = 20;
  double sample_interval = 1.0;
  double map_snapshot_interval = 60.0;
  double obstruction_weight_x = 0.5;
  double obstruction_weight_theta = 0.5;
};

/// Fully resolved parameters of one trial.
struct TrialConfig {
  Mode mode = Mode::Acr;
  std::uint64_t seed = 1;
  double duration = 1800.0;
  int n_active = 3;

  MapParams map;
  /// Classifier accuracies mirror the map's likelihoods unless decoupled.
  bool classifier_calibrated = true;
  SensorParams sensing;
  ControllerParams controller;
  WorldParams world;
  GeometryParams geometry;
  ExperimentParams experiment;

  /// Fills derived fields (lanes, shared speeds, calibrated classifier).
  void resolve();
  /// Throws ConfigError naming the offending field by its config path.
  void validate() const;
};

TrialConfig default_config();

nlohmann::json to_json(const TrialConfig& config);

/// Overlays `doc` on the documented defaults. Unknown keys, wrong types and
/// invariant violations raise ConfigError.
TrialConfig config_from_json(const nlohmann::json& doc);

/// Reads and resolves a config file; throws ConfigError when unreadable.
TrialConfig load_config(const std::string& path);

/// Resolves a dotted config path, or a bare leaf name that occurs exactly
/// once in the schema, to a JSON pointer. Throws ConfigError otherwise.
nlohmann::json::json_pointer resolve_config_path(const std::string& path);

/// Returns `config` with the numeric leaf at `path` replaced by `value`.
TrialConfig with_override(const TrialConfig& config, const std::string& path, double value);

}  // namespace excavsim
