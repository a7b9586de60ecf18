#include "excavsim/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace excavsim {

using nlohmann::json;

namespace {

json pose_json(const Pose& p) { return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json stats_json(const ControllerStats& s) {
  return {{"trips", s.trips},
          {"successes", s.successes},
          {"rests", s.rests},
          {"reversals", s.reversals},
          {"give_ups", s.give_ups},
          {"active_pushes", s.active_pushes},
          {"passive_maneuvers", s.passive_maneuvers},
          {"push_fallbacks", s.push_fallbacks},
          {"robot_contacts", s.robot_contacts},
          {"wall_contacts", s.wall_contacts}};
}

json anova_json(const ModeSummary& s) {
  if (!s.anova) return {{"error", s.anova_error}};
  const AnovaResult& a = *s.anova;
  return {{"f", finite_or_null(a.f)},
          {"p", a.p},
          {"df_between", a.df_between},
          {"df_within", a.df_within},
          {"ss_between", a.ss_between},
          {"ss_within", a.ss_within}};
}

}  // namespace

json to_json(const TrialResult& r) {
  json doc;
  doc["mode"] = std::string(to_string(r.mode));
  doc["seed"] = r.seed;
  doc["duration_s"] = r.duration;
  doc["dt_s"] = r.dt;
  doc["n_active"] = r.n_active;
  doc["final_pellets"] = r.final_pellets();
  doc["nonconverged_steps"] = r.nonconverged_steps;

  json deposits = json::array();
  for (const auto& [t, n] : r.deposits) deposits.push_back({t, n});
  doc["deposits"] = deposits;
  json curve = json::array();
  for (const auto& [t, n] : r.pellet_curve) curve.push_back({t, n});
  doc["pellet_curve"] = curve;

  if (r.final_faulty) {
    doc["faulty"] = {{"initial", pose_json(*r.initial_faulty)},
                     {"final", pose_json(*r.final_faulty)},
                     {"obstruction_index", *r.obstruction}};
  } else {
    doc["faulty"] = nullptr;
  }

  json robots = json::array();
  for (const RobotSummary& rs : r.robots) {
    robots.push_back({{"id", rs.id},
                      {"final_p_e", rs.final_p_e},
                      {"final_k", rs.final_k},
                      {"max_outbound_s", rs.max_outbound_time},
                      {"final_pose", pose_json(r.final_poses.at(static_cast<std::size_t>(rs.id)))},
                      {"stats", stats_json(rs.stats)}});
  }
  doc["robots"] = robots;

  json traj = json::array();
  for (const TrajectoryRow& row : r.trajectories) {
    traj.push_back({row.t, row.id, row.pose.x, row.pose.y, row.pose.theta});
  }
  doc["trajectories"] = {{"columns", {"t", "id", "x", "y", "theta"}}, {"rows", traj}};

  json events = json::array();
  for (const DecisionEvent& e : r.decisions) {
    events.push_back({{"t", e.time}, {"robot", e.robot}, {"event", std::string(to_string(e.kind))}, {"value", e.value}});
  }
  doc["events"] = events;

  json contacts = json::array();
  for (const ContactLogRow& c : r.contacts) {
    contacts.push_back({{"t", c.t},
                        {"robot", c.robot},
                        {"other", c.other},
                        {"true_type", std::string(to_string(c.true_type))},
                        {"sensed", std::string(to_string(c.sensed))},
                        {"x", c.position_estimate}});
  }
  doc["contacts"] = contacts;

  json maps = json::array();
  for (const MapSnapshot& m : r.maps) {
    maps.push_back({{"t", m.t}, {"robot", m.robot}, {"robot_channel", m.robot_channel}, {"wall_channel", m.wall_channel}});
  }
  doc["contact_maps"] = maps;
  return doc;
}

json to_json(const ComparisonSummary& s) {
  json doc;
  json modes = json::object();
  for (const ModeSummary& m : s.modes) {
    modes[std::string(to_string(m.mode))] = {{"n_trials", m.n_trials},
                                             {"mean_pellets", m.mean_pellets},
                                             {"std_pellets", m.std_pellets},
                                             {"mean_obstruction", m.mean_obstruction},
                                             {"std_obstruction", m.std_obstruction},
                                             {"median_faulty_x", finite_or_null(m.median_faulty_x)},
                                             {"mean_faulty_abs_sin_theta", m.mean_faulty_abs_sin_theta},
                                             {"mean_active_pushes", m.mean_active_pushes},
                                             {"mean_reversals", m.mean_reversals},
                                             {"anova", anova_json(m)}};
  }
  doc["modes"] = modes;
  doc["acr_baseline_ratio"] = s.acr_baseline_ratio ? json(*s.acr_baseline_ratio) : json(nullptr);
  json trials = json::array();
  for (const TrialResult& r : s.trials) {
    trials.push_back({{"mode", std::string(to_string(r.mode))},
                      {"seed", r.seed},
                      {"final_pellets", r.final_pellets()},
                      {"active_pushes", r.total_active_pushes()},
                      {"final_faulty", r.final_faulty ? pose_json(*r.final_faulty) : json(nullptr)},
                      {"obstruction_index", r.obstruction ? json(*r.obstruction) : json(nullptr)}});
  }
  doc["trials"] = trials;
  return doc;
}

std::string trajectories_csv(const TrialResult& r) {
  std::string out = "t,id,x,y,theta\n";
  for (const TrajectoryRow& row : r.trajectories) {
    out += fmt(row.t) + "," + std::to_string(row.id) + "," + fmt(row.pose.x) + "," + fmt(row.pose.y) + "," +
           fmt(row.pose.theta) + "\n";
  }
  return out;
}

std::string events_csv(const TrialResult& r) {
  // Merge by time; decisions first at equal times (they precede the step's contacts).
  using Row = std::tuple<double, int, int, std::string>;
  std::vector<Row> rows;
  for (const DecisionEvent& e : r.decisions) {
    rows.emplace_back(e.time, 0, e.robot,
                      fmt(e.time) + "," + std::to_string(e.robot) + "," + std::string(to_string(e.kind)) + "," +
                          fmt(e.value) + ",");
  }
  for (const ContactLogRow& c : r.contacts) {
    rows.emplace_back(c.t, 1, c.robot,
                      fmt(c.t) + "," + std::to_string(c.robot) + ",contact," + fmt(c.position_estimate) +
                          ",true=" + std::string(to_string(c.true_type)) + ";sensed=" +
                          std::string(to_string(c.sensed)) + ";other=" + std::to_string(c.other));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::string out = "t,robot,event,value,detail\n";
  for (const Row& row : rows) out += std::get<3>(row) + "\n";
  return out;
}

std::string pellets_timeseries_csv(const ComparisonSummary& s) {
  std::string out = "t";
  std::vector<std::vector<const TrialResult*>> by_mode;
  for (const ModeSummary& m : s.modes) {
    out += "," + std::string(to_string(m.mode)) + "_mean," + std::string(to_string(m.mode)) + "_std";
    std::vector<const TrialResult*> group;
    for (const TrialResult& r : s.trials) {
      if (r.mode == m.mode) group.push_back(&r);
    }
    by_mode.push_back(group);
  }
  out += "\n";
  if (s.trials.empty()) return out;
  const std::size_t n_samples = s.trials.front().pellet_curve.size();
  for (std::size_t k = 0; k < n_samples; ++k) {
    out += fmt(s.trials.front().pellet_curve[k].first);
    for (const auto& group : by_mode) {
      double sum = 0.0;
      double sq = 0.0;
      for (const TrialResult* r : group) {
        const double v = r->pellet_curve.at(k).second;
        sum += v;
        sq += v * v;
      }
      const double n = static_cast<double>(group.size());
      const double mean = n > 0 ? sum / n : 0.0;
      const double var = n > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
      out += "," + fmt(mean) + "," + fmt(std::sqrt(var));
    }
    out += "\n";
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_trial(const std::filesystem::path& dir, const TrialResult& result) {
  write_file_atomic(dir / "result.json", to_json(result).dump(1) + "\n");
  write_file_atomic(dir / "trajectories.csv", trajectories_csv(result));
  write_file_atomic(dir / "events.csv", events_csv(result));
}

void write_comparison(const std::filesystem::path& dir, const ComparisonSummary& summary) {
  for (const TrialResult& r : summary.trials) {
    write_trial(dir / std::string(to_string(r.mode)) / ("seed_" + std::to_string(r.seed)), r);
  }
  write_file_atomic(dir / "summary.json", to_json(summary).dump(2) + "\n");
  write_file_atomic(dir / "pellets_timeseries.csv", pellets_timeseries_csv(summary));
}

}  // namespace excavsim
