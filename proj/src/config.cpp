#include "excavsim/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace excavsim {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

void merge_strict(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) {
    throw ConfigError((path.empty() ? std::string("config") : path) + " must be a JSON object");
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string here = join(path, key);
    if (!base.contains(key)) throw ConfigError("unknown config key '" + here + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      merge_strict(slot, value, here);
    } else if (here == "assumptions.world.faulty_y" && (value.is_null() || value.is_number())) {
      slot = value;
    } else if (!same_kind(slot, value)) {
      throw ConfigError("config key '" + here + "' has the wrong type (expected " +
                        std::string(slot.type_name()) + ")");
    } else {
      slot = value;
    }
  }
}

Mode parse_mode(const std::string& s) {
  if (s == "acr") return Mode::Acr;
  if (s == "baseline") return Mode::Baseline;
  throw ConfigError("mode = '" + s + "' must be 'acr' or 'baseline'");
}

void with_prefix(const std::string& prefix, const std::function<void()>& check) {
  try {
    check();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + "." + e.what());
  }
}

[[noreturn]] void fail(const std::string& field, double value, const std::string& range) {
  std::ostringstream os;
  os << field << " = " << value << " is outside its valid range " << range;
  throw ConfigError(os.str());
}

void collect_leaves(const json& node, const std::string& path,
                    std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [key, value] : node.items()) {
    const std::string here = join(path, key);
    if (value.is_object()) {
      collect_leaves(value, here, out);
    } else {
      out.emplace_back(key, here);
    }
  }
}

// Degrees rounded to 1e-9 so radian round-off does not leak into configs.
double degrees(double rad) { return std::round(rad_to_deg(rad) * 1e9) / 1e9; }

json::json_pointer to_pointer(const std::string& dotted) {
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) p += "/" + part;
  return json::json_pointer(p);
}

}  // namespace

std::size_t GeometryParams::n_bins() const {
  return static_cast<std::size_t>(std::llround(tunnel.length / bin_width));
}

TrialConfig default_config() {
  TrialConfig c;
  c.resolve();
  return c;
}

void TrialConfig::resolve() {
  controller.mode = mode;
  controller.dt = controller.dt > 0.0 ? controller.dt : 0.05;
  controller.v_max = world.v_max;
  controller.omega_max = world.omega_max;
  controller.lane_dig_y = geometry.lane_dig_fraction * geometry.tunnel.width;
  controller.lane_home_y = geometry.lane_home_fraction * geometry.tunnel.width;
  world.dt_max = std::max(world.dt_max, controller.dt);
  if (classifier_calibrated) {
    sensing.omega_r = map.omega_r;
    sensing.omega_w = map.omega_w;
  }
}

void TrialConfig::validate() const {
  if (!(duration > 0.0)) fail("duration_s", duration, "(0, inf)");
  if (n_active < 1) fail("n_active", n_active, "[1, inf)");
  with_prefix("controller", [&] {
    if (!(controller.p_r >= 0.0 && controller.p_r <= 1.0)) fail("p_r", controller.p_r, "[0, 1]");
    if (!(controller.initial_p_e >= 0.0 && controller.initial_p_e <= 1.0)) {
      fail("initial_p_e", controller.initial_p_e, "[0, 1]");
    }
  });
  with_prefix("assumptions.map", [&] { map.validate(); });
  with_prefix("assumptions.classifier", [&] { sensing.validate(); });
  with_prefix("assumptions.controller", [&] { controller.validate(); });
  with_prefix("assumptions.world", [&] { world.validate(); });

  with_prefix("assumptions.world", [&] {
    const GeometryParams& g = geometry;
    const Tunnel& t = g.tunnel;
    if (!(t.length > 0.0)) fail("tunnel_length_cm", t.length, "(0, inf)");
    if (!(t.width > 0.0)) fail("tunnel_width_cm", t.width, "(0, inf)");
    if (!(t.home_x > 0.0 && t.home_x < t.dig_x)) fail("home_x_cm", t.home_x, "(0, dig_x_cm)");
    if (!(t.dig_x < t.length)) fail("dig_x_cm", t.dig_x, "(home_x_cm, tunnel_length_cm)");
    if (!(g.robot_radius > 0.0)) fail("robot_radius_cm", g.robot_radius, "(0, inf)");
    if (!(g.robot_length >= 2.0 * g.robot_radius)) {
      fail("robot_length_cm", g.robot_length, "[2 * robot_radius_cm, inf)");
    }
    if (g.enforce_two_abreast && t.width < 4.0 * g.robot_radius) {
      fail("tunnel_width_cm", t.width, "[4 * robot_radius_cm, inf) so two robots fit abreast");
    }
    if (!(t.width > 2.0 * g.robot_radius)) fail("tunnel_width_cm", t.width, "(2 * robot_radius_cm, inf)");
    if (!(g.dig_time > 0.0)) fail("dig_time_s", g.dig_time, "(0, inf)");
    if (!(g.lane_dig_fraction > 0.0 && g.lane_dig_fraction < 1.0)) {
      fail("lane_dig_fraction", g.lane_dig_fraction, "(0, 1)");
    }
    if (!(g.lane_home_fraction > 0.0 && g.lane_home_fraction < 1.0)) {
      fail("lane_home_fraction", g.lane_home_fraction, "(0, 1)");
    }
    if (g.n_faulty < 0 || g.n_faulty > 1) fail("n_faulty", g.n_faulty, "{0, 1}");
    if (!(g.faulty_x >= 0.0 && g.faulty_x <= t.length)) fail("faulty_x", g.faulty_x, "[0, tunnel_length_cm]");
    const double fy = g.faulty_y_or_center();
    if (!(fy >= 0.0 && fy <= t.width)) fail("faulty_y", fy, "[0, tunnel_width_cm]");
    if (!std::isfinite(g.faulty_theta_deg)) fail("faulty_theta", g.faulty_theta_deg, "finite degrees");
    if (!(controller.dt > 0.0 && controller.dt <= world.dt_max)) fail("dt_s", controller.dt, "(0, dt_max]");
  });
  with_prefix("assumptions.map", [&] {
    const GeometryParams& g = geometry;
    if (!(g.bin_width > 0.0)) fail("bin_width_cm", g.bin_width, "(0, inf)");
    const double bins = g.tunnel.length / g.bin_width;
    if (std::abs(bins - std::round(bins)) > 1e-9) {
      fail("bin_width_cm", g.bin_width, "a divisor of tunnel_length_cm");
    }
  });
  with_prefix("assumptions.experiment", [&] {
    const ExperimentParams& e = experiment;
    if (e.trials_per_mode < 2) fail("trials_per_mode", e.trials_per_mode, "[2, inf)");
    if (!(e.sample_interval > 0.0)) fail("sample_interval_s", e.sample_interval, "(0, inf)");
    if (!(e.map_snapshot_interval > 0.0)) fail("map_snapshot_interval_s", e.map_snapshot_interval, "(0, inf)");
    if (!(e.obstruction_weight_x >= 0.0)) fail("obstruction_weight_x", e.obstruction_weight_x, "[0, inf)");
    if (!(e.obstruction_weight_theta >= 0.0)) {
      fail("obstruction_weight_theta", e.obstruction_weight_theta, "[0, inf)");
    }
    if (std::abs(e.obstruction_weight_x + e.obstruction_weight_theta - 1.0) > 1e-9) {
      fail("obstruction_weight_x", e.obstruction_weight_x, "weights summing to 1");
    }
  });
}

json to_json(const TrialConfig& c) {
  const ControllerParams& k = c.controller;
  const GeometryParams& g = c.geometry;
  json doc;
  doc["mode"] = std::string(to_string(c.mode));
  doc["seed"] = c.seed;
  doc["duration_s"] = c.duration;
  doc["n_active"] = c.n_active;
  doc["controller"] = {{"p_r", k.p_r}, {"initial_p_e", k.initial_p_e}};
  json& a = doc["assumptions"];
  a["map"] = {{"omega_r", c.map.omega_r},           {"omega_w", c.map.omega_w},
              {"weight", c.map.weight},             {"beta", c.map.beta},
              {"decay_interval_s", c.map.decay_interval}, {"bin_width_cm", g.bin_width},
              {"window_bins", c.map.window_bins}};
  a["classifier"] = {{"calibrated", c.classifier_calibrated},
                     {"omega_r", c.sensing.omega_r},
                     {"omega_w", c.sensing.omega_w}};
  a["sensing"] = {{"sigma_loc_cm", c.sensing.sigma_loc}, {"dig_zone_range_cm", c.sensing.dig_zone_range}};
  a["controller"] = {{"delta_r", k.delta_r},
                     {"t_give_up_s", k.t_give_up},
                     {"t_rest_s", k.t_rest},
                     {"reversal_above", k.reversal_above},
                     {"lookahead_cm", k.lookahead},
                     {"heading_gain", k.heading_gain},
                     {"turn_in_place_deg", degrees(k.turn_in_place)},
                     {"dig_creep_speed", k.dig_creep_speed},
                     {"response_delay_s", k.response_delay},
                     {"backup_distance_cm", k.backup_distance},
                     {"turn_min_deg", degrees(k.turn_min)},
                     {"turn_max_deg", degrees(k.turn_max)},
                     {"escape_distance_cm", k.escape_distance},
                     {"push_speed", k.push_speed},
                     {"push_burst_s", k.push_burst},
                     {"push_progress_cm", k.push_progress}};
  a["world"] = {{"tunnel_length_cm", g.tunnel.length},
                {"tunnel_width_cm", g.tunnel.width},
                {"home_x_cm", g.tunnel.home_x},
                {"dig_x_cm", g.tunnel.dig_x},
                {"robot_length_cm", g.robot_length},
                {"robot_radius_cm", g.robot_radius},
                {"lane_dig_fraction", g.lane_dig_fraction},
                {"lane_home_fraction", g.lane_home_fraction},
                {"dig_time_s", g.dig_time},
                {"mass_ratio", c.world.mass_ratio},
                {"open_home_end", c.world.open_home_end},
                {"torque_gain", c.world.torque_gain},
                {"wall_drag_gain", c.world.wall_drag_gain},
                {"max_iterations", c.world.max_iterations},
                {"penetration_tolerance_cm", c.world.penetration_tolerance},
                {"dt_s", k.dt},
                {"v_max", c.world.v_max},
                {"omega_max", c.world.omega_max},
                {"n_faulty", g.n_faulty},
                {"faulty_x", g.faulty_x},
                {"faulty_y", g.faulty_y ? json(*g.faulty_y) : json(nullptr)},
                {"faulty_theta", g.faulty_theta_deg},
                {"enforce_two_abreast", g.enforce_two_abreast}};
  const ExperimentParams& e = c.experiment;
  a["experiment"] = {{"trials_per_mode", e.trials_per_mode},
                     {"sample_interval_s", e.sample_interval},
                     {"map_snapshot_interval_s", e.map_snapshot_interval},
                     {"obstruction_weight_x", e.obstruction_weight_x},
                     {"obstruction_weight_theta", e.obstruction_weight_theta}};
  return doc;
}

TrialConfig config_from_json(const json& doc) {
  json merged = to_json(default_config());
  merge_strict(merged, doc, "");

  TrialConfig c;
  try {
    c.mode = parse_mode(merged.at("mode").get<std::string>());
    if (merged.at("seed").is_number_float() || merged.at("seed").get<double>() < 0.0) {
      throw ConfigError("seed must be a non-negative integer");
    }
    c.seed = merged.at("seed").get<std::uint64_t>();
    c.duration = merged.at("duration_s").get<double>();
    c.n_active = merged.at("n_active").get<int>();
    c.controller.p_r = merged.at("controller").at("p_r").get<double>();
    c.controller.initial_p_e = merged.at("controller").at("initial_p_e").get<double>();

    const json& a = merged.at("assumptions");
    const json& m = a.at("map");
    c.map.omega_r = m.at("omega_r");
    c.map.omega_w = m.at("omega_w");
    c.map.weight = m.at("weight");
    c.map.beta = m.at("beta");
    c.map.decay_interval = m.at("decay_interval_s");
    c.geometry.bin_width = m.at("bin_width_cm");
    c.map.window_bins = m.at("window_bins").get<int>();

    const json& cl = a.at("classifier");
    c.classifier_calibrated = cl.at("calibrated");
    c.sensing.omega_r = cl.at("omega_r");
    c.sensing.omega_w = cl.at("omega_w");
    const json& s = a.at("sensing");
    c.sensing.sigma_loc = s.at("sigma_loc_cm");
    c.sensing.dig_zone_range = s.at("dig_zone_range_cm");

    const json& k = a.at("controller");
    ControllerParams& p = c.controller;
    p.delta_r = k.at("delta_r");
    p.t_give_up = k.at("t_give_up_s");
    p.t_rest = k.at("t_rest_s");
    p.reversal_above = k.at("reversal_above");
    p.lookahead = k.at("lookahead_cm");
    p.heading_gain = k.at("heading_gain");
    p.turn_in_place = deg_to_rad(k.at("turn_in_place_deg").get<double>());
    p.dig_creep_speed = k.at("dig_creep_speed");
    p.response_delay = k.at("response_delay_s");
    p.backup_distance = k.at("backup_distance_cm");
    p.turn_min = deg_to_rad(k.at("turn_min_deg").get<double>());
    p.turn_max = deg_to_rad(k.at("turn_max_deg").get<double>());
    p.escape_distance = k.at("escape_distance_cm");
    p.push_speed = k.at("push_speed");
    p.push_burst = k.at("push_burst_s");
    p.push_progress = k.at("push_progress_cm");

    const json& w = a.at("world");
    GeometryParams& g = c.geometry;
    g.tunnel.length = w.at("tunnel_length_cm");
    g.tunnel.width = w.at("tunnel_width_cm");
    g.tunnel.home_x = w.at("home_x_cm");
    g.tunnel.dig_x = w.at("dig_x_cm");
    g.robot_length = w.at("robot_length_cm");
    g.robot_radius = w.at("robot_radius_cm");
    g.lane_dig_fraction = w.at("lane_dig_fraction");
    g.lane_home_fraction = w.at("lane_home_fraction");
    g.dig_time = w.at("dig_time_s");
    c.world.mass_ratio = w.at("mass_ratio");
    c.world.open_home_end = w.at("open_home_end");
    c.world.torque_gain = w.at("torque_gain");
    c.world.wall_drag_gain = w.at("wall_drag_gain");
    c.world.max_iterations = w.at("max_iterations").get<int>();
    c.world.penetration_tolerance = w.at("penetration_tolerance_cm");
    p.dt = w.at("dt_s");
    c.world.v_max = w.at("v_max");
    c.world.omega_max = w.at("omega_max");
    g.n_faulty = w.at("n_faulty").get<int>();
    g.faulty_x = w.at("faulty_x");
    if (w.at("faulty_y").is_null()) {
      g.faulty_y.reset();
    } else {
      g.faulty_y = w.at("faulty_y").get<double>();
    }
    g.faulty_theta_deg = w.at("faulty_theta");
    g.enforce_two_abreast = w.at("enforce_two_abreast");

    const json& e = a.at("experiment");
    c.experiment.trials_per_mode = e.at("trials_per_mode").get<int>();
    c.experiment.sample_interval = e.at("sample_interval_s");
    c.experiment.map_snapshot_interval = e.at("map_snapshot_interval_s");
    c.experiment.obstruction_weight_x = e.at("obstruction_weight_x");
    c.experiment.obstruction_weight_theta = e.at("obstruction_weight_theta");
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("malformed config: ") + ex.what());
  }
  // Integer-valued fields given as fractions would be silently truncated.
  for (const char* ptr : {"/n_active", "/assumptions/map/window_bins", "/assumptions/world/max_iterations",
                          "/assumptions/world/n_faulty", "/assumptions/experiment/trials_per_mode"}) {
    const json& v = merged.at(json::json_pointer(ptr));
    if (v.is_number_float() && v.get<double>() != std::floor(v.get<double>())) {
      throw ConfigError(std::string(ptr + 1) + " must be an integer");
    }
  }
  c.resolve();
  c.validate();
  return c;
}

TrialConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

json::json_pointer resolve_config_path(const std::string& path) {
  const json schema = to_json(default_config());
  if (path.empty()) throw ConfigError("empty config path");
  if (path.find('.') != std::string::npos) {
    const auto ptr = to_pointer(path);
    if (!schema.contains(ptr) || schema.at(ptr).is_object()) {
      throw ConfigError("config path '" + path + "' does not name a parameter");
    }
    return ptr;
  }
  std::vector<std::pair<std::string, std::string>> leaves;
  collect_leaves(schema, "", leaves);
  std::vector<std::string> hits;
  for (const auto& [leaf, full] : leaves) {
    if (leaf == path) hits.push_back(full);
  }
  if (hits.size() != 1) {
    throw ConfigError("config path '" + path + "' " +
                      (hits.empty() ? std::string("does not name a parameter") : "is ambiguous"));
  }
  return to_pointer(hits.front());
}

TrialConfig with_override(const TrialConfig& config, const std::string& path, double value) {
  const auto ptr = resolve_config_path(path);
  json doc = to_json(config);
  json& slot = doc[ptr];
  if (!(slot.is_number() || slot.is_null())) {
    throw ConfigError("config path '" + path + "' is not numeric");
  }
  if (slot.is_number_integer() || slot.is_number_unsigned()) {
    if (value != std::floor(value)) throw ConfigError("config path '" + path + "' takes integers");
    slot = static_cast<std::int64_t>(value);
  } else {
    slot = value;
  }
  return config_from_json(doc);
}

}  // namespace excavsim
