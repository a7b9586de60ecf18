#include "excavsim/contact_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace excavsim {

void MapParams::validate() const {
  auto fail = [](const char* field, double value, const char* range) {
    std::ostringstream os;
    os << field << " = " << value << " is outside its valid range " << range;
    throw ConfigError(os.str());
  };
  if (!(omega_r > 0.5 && omega_r <= 1.0)) fail("omega_r", omega_r, "(0.5, 1]");
  if (!(omega_w > 0.5 && omega_w <= 1.0)) fail("omega_w", omega_w, "(0.5, 1]");
  if (!(weight > 0.0)) fail("weight", weight, "(0, inf)");
  if (!(beta > 0.0)) fail("beta", beta, "(0, inf)");
  if (!(decay_interval > 0.0)) fail("decay_interval_s", decay_interval, "(0, inf)");
  if (window_bins < 1) fail("window_bins", window_bins, "[1, inf)");
}

ContactMap::ContactMap(std::size_t n_bins, double bin_width)
    : bin_width_(bin_width), robot_(n_bins, 0.0), wall_(n_bins, 0.0) {
  if (n_bins == 0 || !(bin_width > 0.0)) {
    throw ConfigError("contact map needs at least one bin of positive width");
  }
}

std::size_t ContactMap::bin_of(double position_cm) const {
  if (!(position_cm >= 0.0 && position_cm < length())) {
    std::ostringstream os;
    os << "contact position " << position_cm << " cm outside tunnel [0, " << length() << ")";
    throw std::out_of_range(os.str());
  }
  const auto bin = static_cast<std::size_t>(position_cm / bin_width_);
  return std::min(bin, n_bins() - 1);
}

void ContactMap::record_contact(const MapParams& params, ContactType sensed, double position_cm) {
  const std::size_t b = bin_of(position_cm);
  if (sensed == ContactType::Robot) {
    robot_[b] += params.omega_r * params.weight;
    wall_[b] += (1.0 - params.omega_r) * params.weight;
  } else {
    wall_[b] += params.omega_w * params.weight;
    robot_[b] += (1.0 - params.omega_w) * params.weight;
  }
}

void ContactMap::decay(double beta) {
  // Residues of a few ulps are round-off from repeated subtraction, not
  // evidence; they are flushed so the prior is recovered exactly.
  constexpr double kUlpSlack = 4.0 * std::numeric_limits<double>::epsilon();
  auto step = [beta](double v) {
    const double next = v - beta;
    return next > kUlpSlack * v ? next : 0.0;
  };
  std::ranges::transform(robot_, robot_.begin(), step);
  std::ranges::transform(wall_, wall_.begin(), step);
}

std::pair<std::size_t, std::size_t> ContactMap::window(const MapParams& params,
                                                       double robot_position_cm) const {
  const auto center = static_cast<std::ptrdiff_t>(bin_of(robot_position_cm));
  const auto width = static_cast<std::ptrdiff_t>(params.window_bins);
  const std::ptrdiff_t lo = center - (width - 1) / 2;
  const std::ptrdiff_t hi = lo + width - 1;
  const auto last = static_cast<std::ptrdiff_t>(n_bins()) - 1;
  return {static_cast<std::size_t>(std::max<std::ptrdiff_t>(lo, 0)),
          static_cast<std::size_t>(std::min(hi, last))};
}

std::pair<double, double> ContactMap::window_sums(const MapParams& params,
                                                  double robot_position_cm) const {
  const auto [lo, hi] = window(params, robot_position_cm);
  double s_r = 0.0;
  double s_w = 0.0;
  for (std::size_t b = lo; b <= hi; ++b) {
    s_r += robot_[b];
    s_w += wall_[b];
  }
  return {s_r, s_w};
}

double ContactMap::faulty_likelihood(const MapParams& params, double robot_position_cm) const {
  const auto [s_r, s_w] = window_sums(params, robot_position_cm);
  return softmax_first(s_r, s_w);
}

double ContactMap::max_entry() const {
  double m = 0.0;
  for (double v : robot_) m = std::max(m, v);
  for (double v : wall_) m = std::max(m, v);
  return m;
}

bool ContactMap::is_zero() const { return max_entry() == 0.0; }

double softmax_first(double a, double b) {
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  const double r = ea / (ea + eb);
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(r, lo, hi);
}

}  // namespace excavsim
