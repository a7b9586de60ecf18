#include <gtest/gtest.h>

#include <string>

#include "excavsim/config.hpp"

using namespace excavsim;
using nlohmann::json;

namespace {

std::string error_of(const json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsValidate) {
  const TrialConfig c = default_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.n_active, 3);
  EXPECT_EQ(c.duration, 1800.0);
  EXPECT_EQ(c.controller.p_r, 0.64);
  EXPECT_EQ(c.geometry.n_bins(), 30u);
  EXPECT_EQ(c.geometry.faulty_x, 150.0);
  EXPECT_EQ(c.geometry.faulty_y_or_center(), 35.0);
}

TEST(Config, RoundTripsThroughJson) {
  const TrialConfig c = default_config();
  const json doc = to_json(c);
  EXPECT_EQ(to_json(config_from_json(doc)), doc);
  EXPECT_EQ(to_json(config_from_json(json::object())), doc);
}

TEST(Config, OverlayChangesOnlyNamedFields) {
  const TrialConfig c = config_from_json({{"mode", "baseline"}, {"assumptions", {{"map", {{"beta", 0.2}}}}}});
  EXPECT_EQ(c.mode, Mode::Baseline);
  EXPECT_EQ(c.controller.mode, Mode::Baseline);
  EXPECT_EQ(c.map.beta, 0.2);
  EXPECT_EQ(c.map.omega_r, 0.9);
}

TEST(Config, CalibratedClassifierMirrorsMap) {
  const TrialConfig c = config_from_json({{"assumptions", {{"map", {{"omega_r", 0.75}}}}}});
  EXPECT_EQ(c.sensing.omega_r, 0.75);
  const TrialConfig d = config_from_json(
      {{"assumptions", {{"map", {{"omega_r", 0.75}}}, {"classifier", {{"calibrated", false}, {"omega_r", 0.95}}}}}});
  EXPECT_EQ(d.sensing.omega_r, 0.95);
  EXPECT_EQ(d.map.omega_r, 0.75);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_NE(error_of({{"bogus", 1}}).find("bogus"), std::string::npos);
  EXPECT_NE(error_of({{"assumptions", {{"map", {{"betta", 0.1}}}}}}).find("assumptions.map.betta"), std::string::npos);
}

TEST(Config, RejectsWrongTypes) {
  EXPECT_NE(error_of({{"duration_s", "long"}}).find("duration_s"), std::string::npos);
  EXPECT_NE(error_of({{"assumptions", "none"}}).find("assumptions"), std::string::npos);
  EXPECT_NE(error_of({{"n_active", 2.5}}).find("n_active"), std::string::npos);
  EXPECT_NE(error_of({{"seed", -3}}).find("seed"), std::string::npos);
}

TEST(Config, InvariantViolationsNameTheField) {
  EXPECT_NE(error_of({{"controller", {{"p_r", 1.5}}}}).find("controller.p_r"), std::string::npos);
  EXPECT_NE(error_of({{"assumptions", {{"map", {{"omega_r", 0.4}}}}}}).find("assumptions.map.omega_r"),
            std::string::npos);
  EXPECT_NE(error_of({{"assumptions", {{"world", {{"tunnel_width_cm", 30.0}}}}}}).find("tunnel_width_cm"),
            std::string::npos);
  EXPECT_NE(error_of({{"assumptions", {{"map", {{"bin_width_cm", 7.0}}}}}}).find("bin_width_cm"),
            std::string::npos);
  EXPECT_NE(error_of({{"mode", "greedy"}}).find("mode"), std::string::npos);
  EXPECT_NE(error_of({{"assumptions", {{"experiment", {{"trials_per_mode", 1}}}}}}).find("trials_per_mode"),
            std::string::npos);
}

TEST(Config, TwoAbreastCanBeWaived) {
  const TrialConfig c = config_from_json(
      {{"assumptions", {{"world", {{"tunnel_width_cm", 34.0}, {"enforce_two_abreast", false}}}}}});
  EXPECT_EQ(c.geometry.tunnel.width, 34.0);
}

TEST(Config, FaultyYAcceptsNullOrNumber) {
  EXPECT_EQ(config_from_json({{"assumptions", {{"world", {{"faulty_y", 20.0}}}}}}).geometry.faulty_y_or_center(), 20.0);
  EXPECT_EQ(config_from_json({{"assumptions", {{"world", {{"faulty_y", nullptr}}}}}}).geometry.faulty_y_or_center(),
            35.0);
}

TEST(ConfigPath, ResolvesDottedAndBareNames) {
  EXPECT_EQ(resolve_config_path("faulty_x").to_string(), "/assumptions/world/faulty_x");
  EXPECT_EQ(resolve_config_path("assumptions.map.beta").to_string(), "/assumptions/map/beta");
  // omega_r lives under map and classifier.
  EXPECT_THROW(resolve_config_path("omega_r"), ConfigError);
  EXPECT_THROW(resolve_config_path("nothing"), ConfigError);
  EXPECT_THROW(resolve_config_path("assumptions.map"), ConfigError);
}

TEST(ConfigPath, OverrideKeepsIntegerFieldsIntegral) {
  const TrialConfig c = default_config();
  EXPECT_EQ(with_override(c, "faulty_x", 60.0).geometry.faulty_x, 60.0);
  EXPECT_EQ(with_override(c, "n_active", 5.0).n_active, 5);
  EXPECT_THROW(with_override(c, "n_active", 2.5), ConfigError);
  EXPECT_THROW(with_override(c, "calibrated", 1.0), ConfigError);
}

TEST(Config, LoadReportsUnreadableFiles) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}
