#include "excavsim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace excavsim {

void SensorParams::validate() const {
  auto fail = [](const char* field, double value, const char* range) {
    std::ostringstream os;
    os << field << " = " << value << " is outside its valid range " << range;
    throw ConfigError(os.str());
  };
  if (!(omega_r > 0.5 && omega_r <= 1.0)) fail("classifier_omega_r", omega_r, "(0.5, 1]");
  if (!(omega_w > 0.5 && omega_w <= 1.0)) fail("classifier_omega_w", omega_w, "(0.5, 1]");
  if (!(sigma_loc >= 0.0)) fail("sigma_loc_cm", sigma_loc, "[0, inf)");
  if (!(dig_zone_range >= 0.0)) fail("dig_zone_range_cm", dig_zone_range, "[0, inf)");
}

ContactType classify_contact(ContactType true_type, const SensorParams& params, Rng& rng) {
  const double accuracy = true_type == ContactType::Robot ? params.omega_r : params.omega_w;
  return rng.uniform() < accuracy ? true_type : other(true_type);
}

double estimate_position(double true_x, double tunnel_length, const SensorParams& params,
                         Rng& rng) {
  double l = true_x;
  if (params.sigma_loc > 0.0) l += rng.normal(0.0, params.sigma_loc);
  return std::clamp(l, 0.0, std::nextafter(tunnel_length, 0.0));
}

bool detect_dig_zone(const Pose& pose, double anterior_offset, double dig_x,
                     const SensorParams& params) {
  const double anterior_x = pose.x + anterior_offset * std::cos(pose.theta);
  return anterior_x >= dig_x - params.dig_zone_range;
}

}  // namespace excavsim
