#include "excavsim/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "excavsim/config.hpp"
#include "excavsim/experiment.hpp"
#include "excavsim/output.hpp"

namespace excavsim {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutEnv = "EXCAVSIM_OUT";

struct RunSpec {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string mode;
  std::optional<double> duration;
  int jobs = 1;
  std::string param;
  std::vector<double> values;
};

std::vector<Mode> parse_modes(const std::string& s) {
  if (s.empty() || s == "both") return {Mode::Baseline, Mode::Acr};
  if (s == "acr") return {Mode::Acr};
  if (s == "baseline") return {Mode::Baseline};
  throw ConfigError("--mode = '" + s + "' must be acr, baseline or both");
}

/// Flags override the config file, which overrides the defaults.
TrialConfig resolve_config(const RunSpec& spec, bool single_mode) {
  TrialConfig c = spec.config_path.empty() ? default_config() : load_config(spec.config_path);
  if (!spec.mode.empty()) {
    if (single_mode) {
      if (spec.mode == "acr") {
        c.mode = Mode::Acr;
      } else if (spec.mode == "baseline") {
        c.mode = Mode::Baseline;
      } else {
        throw ConfigError("--mode = '" + spec.mode + "' must be acr or baseline");
      }
    } else {
      parse_modes(spec.mode);
    }
  }
  if (spec.seed) c.seed = *spec.seed;
  if (spec.duration) {
    if (!(*spec.duration > 0.0)) throw ConfigError("--duration must be positive");
    c.duration = *spec.duration;
  }
  if (spec.trials) {
    if (*spec.trials < 2) throw ConfigError("--trials = " + std::to_string(*spec.trials) + " must be at least 2");
    c.experiment.trials_per_mode = *spec.trials;
  }
  if (spec.jobs < 1) throw ConfigError("--jobs must be at least 1");
  c.resolve();
  c.validate();
  return c;
}

fs::path output_dir(const RunSpec& spec) {
  fs::path dir = spec.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutEnv);
    dir = env && *env ? fs::path(env) : fs::path("excavsim_out");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("output directory '" + dir.string() + "' is not writable");
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream p(probe);
    if (!p) throw ConfigError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void print_summary(std::ostream& out, const ComparisonSummary& s) {
  for (const ModeSummary& m : s.modes) {
    out << to_string(m.mode) << ": pellets " << m.mean_pellets << " +/- " << m.std_pellets
        << ", median faulty x " << m.median_faulty_x << ", obstruction " << m.mean_obstruction
        << ", active pushes " << m.mean_active_pushes << "\n";
  }
  if (s.acr_baseline_ratio) out << "acr/baseline pellet ratio " << *s.acr_baseline_ratio << "\n";
}

int cmd_run(const RunSpec& spec, std::ostream& out) {
  const TrialConfig c = resolve_config(spec, true);
  const fs::path dir = output_dir(spec);
  const TrialResult r = run_trial(c);
  write_trial(dir, r);
  out << to_string(r.mode) << " seed " << r.seed << ": " << r.final_pellets() << " pellets";
  if (r.final_faulty) out << ", faulty at x=" << r.final_faulty->x << " obstruction " << *r.obstruction;
  out << "\n";
  return kExitOk;
}

int cmd_compare(const RunSpec& spec, std::ostream& out) {
  const TrialConfig c = resolve_config(spec, false);
  const auto modes = parse_modes(spec.mode);
  const fs::path dir = output_dir(spec);
  const ComparisonSummary s = compare(c, modes, c.experiment.trials_per_mode, c.seed, spec.jobs);
  write_comparison(dir, s);
  print_summary(out, s);
  return kExitOk;
}

int cmd_sweep(const RunSpec& spec, std::ostream& out) {
  const TrialConfig c = resolve_config(spec, false);
  const auto modes = parse_modes(spec.mode);
  if (spec.values.empty()) throw ConfigError("--values must list at least one value");
  std::vector<TrialConfig> variants;
  for (double v : spec.values) variants.push_back(with_override(c, spec.param, v));
  const fs::path dir = output_dir(spec);

  std::string csv =
      "index,param,value,baseline_mean_pellets,acr_mean_pellets,acr_baseline_ratio,"
      "acr_mean_active_pushes,baseline_median_faulty_x,acr_median_faulty_x,"
      "baseline_mean_obstruction,acr_mean_obstruction\n";
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const ComparisonSummary s =
        compare(variants[i], modes, variants[i].experiment.trials_per_mode, variants[i].seed, spec.jobs);
    char name[32];
    std::snprintf(name, sizeof name, "%03zu", i);
    write_comparison(dir / (std::string(name) + "_" + spec.param + "=" + format_value(spec.values[i])), s);
    const ModeSummary* b = s.find(Mode::Baseline);
    const ModeSummary* a = s.find(Mode::Acr);
    auto field = [](const ModeSummary* m, double ModeSummary::*f) {
      return m ? format_value(m->*f) : std::string();
    };
    csv += std::to_string(i) + "," + spec.param + "," + format_value(spec.values[i]) + "," +
           field(b, &ModeSummary::mean_pellets) + "," + field(a, &ModeSummary::mean_pellets) + "," +
           (s.acr_baseline_ratio ? format_value(*s.acr_baseline_ratio) : std::string()) + "," +
           field(a, &ModeSummary::mean_active_pushes) + "," + field(b, &ModeSummary::median_faulty_x) + "," +
           field(a, &ModeSummary::median_faulty_x) + "," + field(b, &ModeSummary::mean_obstruction) + "," +
           field(a, &ModeSummary::mean_obstruction) + "\n";
    out << spec.param << " = " << spec.values[i] << "\n";
    print_summary(out, s);
  }
  write_file_atomic(dir / "sweep.csv", csv);
  return kExitOk;
}

int cmd_validate(const RunSpec& spec, std::ostream& out) {
  const TrialConfig c = resolve_config(spec, true);
  out << to_json(c).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collective excavation simulator with active contact response"};
  app.require_subcommand(1);
  RunSpec spec;

  auto add_common = [&spec](CLI::App* sub) {
    sub->add_option("--config", spec.config_path, "JSON config file");
    sub->add_option("--out", spec.out_dir, std::string("output directory (default $") + kOutEnv + ")");
    sub->add_option("--seed", spec.seed, "trial seed, or first seed of a comparison");
    sub->add_option("--mode", spec.mode, "acr, baseline (compare/sweep also accept both)");
    sub->add_option("--duration", spec.duration, "simulated seconds per trial");
  };
  auto add_batch = [&spec](CLI::App* sub) {
    sub->add_option("--trials", spec.trials, "trials per mode");
    sub->add_option("--jobs", spec.jobs, "worker threads");
  };

  CLI::App* run = app.add_subcommand("run", "run one trial");
  add_common(run);
  CLI::App* cmp = app.add_subcommand("compare", "run trials for each mode and aggregate");
  add_common(cmp);
  add_batch(cmp);
  CLI::App* sweep = app.add_subcommand("sweep", "one comparison per value of a config parameter");
  add_common(sweep);
  add_batch(sweep);
  sweep->add_option("--param", spec.param, "config path, e.g. faulty_x or assumptions.map.beta")->required();
  sweep->add_option("--values", spec.values, "comma-separated values")->delimiter(',');
  CLI::App* validate = app.add_subcommand("validate", "resolve and print the config");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(spec, out);
    if (cmp->parsed()) return cmd_compare(spec, out);
    if (sweep->parsed()) return cmd_sweep(spec, out);
    return cmd_validate(spec, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace excavsim
