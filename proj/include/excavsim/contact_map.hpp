#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "excavsim/types.hpp"

namespace excavsim {

struct MapParams {
  double omega_r = 0.9;  // P(sensed robot | robot contact)
  double omega_w = 0.9;  // P(sensed wall | wall contact)
  double weight = 1.0;
  double beta = 0.05;
  double decay_interval = 5.0;  // seconds
  int window_bins = 4;

  /// Throws ConfigError naming the first field out of range.
  void validate() const;
};

/// Egocentric two-channel contact histogram over the tunnel length.
///
/// Each bin holds a non-negative frequency for sensed robot contacts and for
/// sensed wall contacts. Updates add the calibrated likelihood mass to the
/// sensed channel and the residual to the opposite one; decay subtracts a
/// constant from every bin and floors at zero.
class ContactMap {
 public:
  ContactMap(std::size_t n_bins, double bin_width);

  std::size_t n_bins() const { return robot_.size(); }
  double bin_width() const { return bin_width_; }
  double length() const { return bin_width_ * static_cast<double>(n_bins()); }

  /// Bin holding `position_cm`. Throws std::out_of_range outside [0, length).
  std::size_t bin_of(double position_cm) const;

  void record_contact(const MapParams& params, ContactType sensed, double position_cm);
  void decay(double beta);

  /// Likelihood that a robot contact at `robot_position_cm` comes from a
  /// stationary robot: softmax of the robot and wall channel sums over the
  /// window of `params.window_bins` bins around the robot's bin.
  double faulty_likelihood(const MapParams& params, double robot_position_cm) const;

  /// Channel sums over the likelihood window, {robot, wall}.
  std::pair<double, double> window_sums(const MapParams& params, double robot_position_cm) const;

  /// Inclusive bin range of the likelihood window, truncated at the ends.
  std::pair<std::size_t, std::size_t> window(const MapParams& params, double robot_position_cm) const;

  std::span<const double> robot_channel() const { return robot_; }
  std::span<const double> wall_channel() const { return wall_; }
  std::span<double> robot_channel() { return robot_; }
  std::span<double> wall_channel() { return wall_; }

  double max_entry() const;
  bool is_zero() const;

 private:
  double bin_width_;
  std::vector<double> robot_;
  std::vector<double> wall_;
};

/// Two-way softmax e^a / (e^a + e^b) evaluated without overflow; the result is
/// kept strictly inside (0, 1).
double softmax_first(double a, double b);

}  // namespace excavsim
