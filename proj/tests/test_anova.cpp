#include <gtest/gtest.h>

#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "excavsim/anova.hpp"

using namespace excavsim;

namespace {

struct Reference {
  double f;
  double p;
};

// Textbook sums of squares in extended precision; p from Boost.Math.
Reference reference_anova(const std::vector<std::vector<double>>& groups) {
  long double grand = 0.0L;
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (double v : g) grand += v;
    n += g.size();
  }
  grand /= static_cast<long double>(n);
  long double ssb = 0.0L;
  long double ssw = 0.0L;
  for (const auto& g : groups) {
    long double mean = 0.0L;
    for (double v : g) mean += v;
    mean /= static_cast<long double>(g.size());
    ssb += static_cast<long double>(g.size()) * (mean - grand) * (mean - grand);
    for (double v : g) ssw += (v - mean) * (v - mean);
  }
  const double d1 = static_cast<double>(groups.size() - 1);
  const double d2 = static_cast<double>(n - groups.size());
  const double f = static_cast<double>((ssb / d1) / (ssw / d2));
  const boost::math::fisher_f dist(d1, d2);
  return {f, boost::math::cdf(boost::math::complement(dist, f))};
}

}  // namespace

TEST(Anova, HandComputedExample) {
  const std::vector<std::vector<double>> groups{{1, 2}, {2, 3}, {3, 4}};
  const AnovaResult r = one_way_anova(groups);
  EXPECT_NEAR(r.ss_between, 4.0, 1e-12);
  EXPECT_NEAR(r.ss_within, 1.5, 1e-12);
  EXPECT_EQ(r.df_between, 2);
  EXPECT_EQ(r.df_within, 3);
  // MS_between = 2, MS_within = 0.5.
  EXPECT_NEAR(r.f, 4.0, 1e-9);
  const Reference ref = reference_anova(groups);
  EXPECT_NEAR(r.p, ref.p, 1e-9);
  EXPECT_NEAR(r.p, 0.142427173, 1e-8);
}

TEST(Anova, IdenticalGroupMeans) {
  const std::vector<std::vector<double>> groups{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  const AnovaResult r = one_way_anova(groups);
  EXPECT_EQ(r.f, 0.0);
  EXPECT_EQ(r.p, 1.0);
}

TEST(Anova, ConstantGroupLargeSeparation) {
  const std::vector<std::vector<double>> groups{{5, 5, 5}, {20, 21, 19}, {40, 41, 39}};
  const AnovaResult r = one_way_anova(groups);
  EXPECT_GT(r.f, 100.0);
  EXPECT_LT(r.p, 0.01);
  const Reference ref = reference_anova(groups);
  EXPECT_NEAR(r.f, ref.f, 1e-9 * ref.f);
}

TEST(Anova, ZeroWithinVarianceIsInfinite) {
  const std::vector<std::vector<double>> groups{{1, 1}, {2, 2}};
  const AnovaResult r = one_way_anova(groups);
  EXPECT_TRUE(std::isinf(r.f));
  EXPECT_EQ(r.p, 0.0);
}

TEST(Anova, DegenerateInputRaises) {
  const std::vector<std::vector<double>> groups{{3, 3}, {3, 3}, {3, 3}};
  EXPECT_THROW(one_way_anova(groups), DegenerateDataError);
}

TEST(Anova, RejectsUndersizedInput) {
  const std::vector<std::vector<double>> one{{1, 2, 3}};
  EXPECT_THROW(one_way_anova(one), std::invalid_argument);
  const std::vector<std::vector<double>> tiny{{1, 2}, {3}};
  EXPECT_THROW(one_way_anova(tiny), std::invalid_argument);
}

TEST(Anova, RandomDatasetsMatchReference) {
  std::mt19937_64 gen(123);
  std::uniform_int_distribution<int> n_groups(2, 6);
  std::uniform_int_distribution<int> n_obs(2, 9);
  std::normal_distribution<double> shift(0.0, 2.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> groups(static_cast<std::size_t>(n_groups(gen)));
    for (auto& g : groups) {
      const double mu = 10.0 + shift(gen);
      g.resize(static_cast<std::size_t>(n_obs(gen)));
      for (double& v : g) v = mu + noise(gen);
    }
    const AnovaResult r = one_way_anova(groups);
    const Reference ref = reference_anova(groups);
    EXPECT_NEAR(r.f, ref.f, 1e-9 * ref.f) << "dataset " << trial;
    EXPECT_NEAR(r.p, ref.p, 1e-6 * ref.p) << "dataset " << trial;
  }
}

TEST(IncompleteBeta, MatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double b : {0.5, 1.5, 4.0, 30.0}) {
      for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        const double ref = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), ref, 1e-12 + 1e-10 * ref);
      }
    }
  }
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
}

TEST(FSurvival, EdgeValues) {
  EXPECT_EQ(f_survival(0.0, 2.0, 3.0), 1.0);
  EXPECT_EQ(f_survival(INFINITY, 2.0, 3.0), 0.0);
  EXPECT_NEAR(f_survival(2.0, 2.0, 3.0), 0.2805658588748473, 1e-12);
}
