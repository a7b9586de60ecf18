#pragma once

#include "excavsim/rng.hpp"
#include "excavsim/types.hpp"

namespace excavsim {

struct SensorParams {
  double omega_r = 0.9;  // classifier accuracy on robot contacts
  double omega_w = 0.9;  // classifier accuracy on wall contacts
  double sigma_loc = 5.0;  // cm, longitudinal localization noise
  double dig_zone_range = 15.0;  // cm, magnetometer trigger distance

  void validate() const;
};

/// Noisy contact classifier: reports the true type with the calibrated
/// accuracy, otherwise the other label.
ContactType classify_contact(ContactType true_type, const SensorParams& params, Rng& rng);

/// Odometry estimate of the longitudinal coordinate, clamped into
/// [0, tunnel_length).
double estimate_position(double true_x, double tunnel_length, const SensorParams& params, Rng& rng);

/// Magnetometer trigger: the anterior point (center advanced by
/// `anterior_offset` along the heading) is within range of, or past, the dig
/// boundary.
bool detect_dig_zone(const Pose& pose, double anterior_offset, double dig_x,
                     const SensorParams& params);

}  // namespace excavsim
