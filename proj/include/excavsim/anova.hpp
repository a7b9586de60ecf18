#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace excavsim {

/// All observations identical: neither variance term can be formed.
class DegenerateDataError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  int df_between = 0;
  int df_within = 0;
  double ss_between = 0.0;
  double ss_within = 0.0;
};

/// One-way analysis of variance across `groups`. Needs at least two groups of
/// at least two observations each. Zero within-group variance with distinct
/// group means gives F = +inf, p = 0.
AnovaResult one_way_anova(std::span<const std::vector<double>> groups);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// P(F > f) for an F(d1, d2) variate.
double f_survival(double f, double d1, double d2);

}  // namespace excavsim
