#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qcawalk/errors.hpp"
#include "qcawalk/metrics.hpp"

using namespace qcaw;

namespace {

Distribution dist(std::initializer_list<double> p) {
  std::map<Outcome, double> m;
  std::uint64_t v = 0;
  for (double x : p) m[Outcome::vertex(v++)] = x;
  return Distribution::exact(m);
}

Distribution random_dist(std::mt19937& gen, int n) {
  std::exponential_distribution<double> e;
  std::vector<double> w(static_cast<std::size_t>(n));
  double s = 0;
  for (auto& x : w) s += (x = e(gen));
  std::map<Outcome, double> m;
  for (int i = 0; i < n; ++i) m[Outcome::vertex(static_cast<std::uint64_t>(i))] = w[i] / s;
  return Distribution::exact(m);
}

std::vector<Distribution> marked_series(std::initializer_list<double> pm) {
  std::vector<Distribution> out;
  for (double p : pm) out.push_back(dist({1 - p, p}));
  return out;
}

}  // namespace

TEST(Hellinger, ExactValues) {
  EXPECT_DOUBLE_EQ(hellinger_fidelity(dist({0.3, 0.7}), dist({0.3, 0.7})), 1.0);
  EXPECT_DOUBLE_EQ(hellinger_fidelity(dist({1, 0}), dist({0, 1})), 0.0);
  EXPECT_NEAR(hellinger_fidelity(dist({1, 0}), dist({0.5, 0.5})), 0.5, 1e-15);
}

TEST(L1, ExactValues) {
  EXPECT_DOUBLE_EQ(l1_distance(dist({0.3, 0.7}), dist({0.3, 0.7})), 0.0);
  EXPECT_DOUBLE_EQ(l1_distance(dist({1, 0}), dist({0, 1})), 2.0);
  EXPECT_DOUBLE_EQ(l1_distance(dist({1, 0}), dist({0.5, 0.5})), 1.0);
}

TEST(Metrics, MissingLabelsCountAsZero) {
  const auto p = Distribution::exact({{Outcome::vertex(0), 1.0}});
  const auto q = Distribution::exact({{Outcome::leakage(), 1.0}});
  EXPECT_DOUBLE_EQ(hellinger_fidelity(p, q), 0.0);
  EXPECT_DOUBLE_EQ(l1_distance(p, q), 2.0);
}

TEST(Metrics, BoundsSymmetryTriangle) {
  std::mt19937 gen(1);
  for (int k = 0; k < 200; ++k) {
    const auto p = random_dist(gen, 5);
    const auto q = random_dist(gen, 5);
    const auto r = random_dist(gen, 5);
    const double f = hellinger_fidelity(p, q);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    EXPECT_DOUBLE_EQ(f, hellinger_fidelity(q, p));
    EXPECT_LE(l1_distance(p, r), l1_distance(p, q) + l1_distance(q, r) + 1e-15);
    EXPECT_LE(l1_distance(p, q), 2.0);
  }
}

TEST(Metrics, PermutationInvariant) {
  const auto p = dist({0.1, 0.2, 0.7});
  const auto q = dist({0.3, 0.3, 0.4});
  const auto pp = dist({0.7, 0.1, 0.2});
  const auto qp = dist({0.4, 0.3, 0.3});
  EXPECT_NEAR(hellinger_fidelity(p, q), hellinger_fidelity(pp, qp), 1e-15);
  EXPECT_NEAR(l1_distance(p, q), l1_distance(pp, qp), 1e-15);
}

TEST(Search, SuccessProbabilityFirstGlobalMax) {
  const auto s = marked_series({0.1, 0.4, 0.2, 0.4, 0.3});
  const auto peak = success_probability(s, 1);
  EXPECT_DOUBLE_EQ(peak.probability, 0.4);
  EXPECT_EQ(peak.step, 1);
  EXPECT_EQ(hitting_time(s, 1), 1);
  const auto flat = marked_series({0.1, 0.1, 0.1});
  EXPECT_EQ(hitting_time(flat, 1), 0);
  EXPECT_DOUBLE_EQ(success_probability(flat, 1).probability, 0.1);
  EXPECT_THROW(success_probability(std::vector<Distribution>{}, 0), DomainError);
}

TEST(Search, DegradedRatio) {
  EXPECT_DOUBLE_EQ(degraded_ratio(0.28, 0.28), 1.0);
  EXPECT_DOUBLE_EQ(degraded_ratio(0.14, 0.28), 0.5);
  EXPECT_THROW(degraded_ratio(0.1, 0.0), DomainError);
}

TEST(Search, Selectivity) {
  EXPECT_NEAR(selectivity(dist({0.25, 0.25, 0.25, 0.25}), 2).value, 0.0, 1e-15);
  const double e = std::exp(1.0);
  const double x = 1 / (e + 2);
  EXPECT_NEAR(selectivity(dist({x, e * x, x}), 1).value, 1.0, 1e-12);
  // leakage is not a competitor
  const auto d = Distribution::exact(
      {{Outcome::vertex(0), 0.2}, {Outcome::vertex(1), 0.1}, {Outcome::leakage(), 0.7}});
  EXPECT_NEAR(selectivity(d, 0).value, std::log(2.0), 1e-15);
  const auto only = Distribution::exact({{Outcome::vertex(0), 0.4}, {Outcome::leakage(), 0.6}});
  EXPECT_TRUE(selectivity(only, 0).infinite);
}

TEST(Series, MovingAverageAndMonotone) {
  const std::vector<double> v{1, 3, 5, 7};
  const auto m = moving_average(v, 2);
  EXPECT_EQ(m, (std::vector<double>{1, 2, 4, 6}));
  EXPECT_TRUE(non_increasing(std::vector<double>{3, 3, 2, 1}));
  EXPECT_FALSE(non_increasing(std::vector<double>{3, 3.1, 2}));
  EXPECT_TRUE(non_increasing(std::vector<double>{3, 3.1, 2}, 0.2));
}

TEST(Fits, LinearExact) {
  const std::vector<double> x{4, 8, 16};
  const std::vector<double> y{3, 5, 9};  // 1 + x/2
  const auto f = fit_linear(x, y);
  EXPECT_NEAR(f.slope, 0.5, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_THROW(fit_linear(std::vector<double>{1, 1}, std::vector<double>{1, 2}), DomainError);
}

TEST(Fits, LinearLeastSquaresByHand) {
  // x = 0,1,2 ; y = 0,2,1 -> slope 1/2, intercept 1/2, R^2 = 0.25
  const auto f = fit_linear(std::vector<double>{0, 1, 2}, std::vector<double>{0, 2, 1});
  EXPECT_NEAR(f.slope, 0.5, 1e-12);
  EXPECT_NEAR(f.intercept, 0.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 0.25, 1e-12);
}

TEST(Fits, InverseLinear) {
  const std::vector<double> x{4, 8, 16};
  const auto f = fit_inverse(x, std::vector<double>{0.5, 0.25, 0.125});
  EXPECT_NEAR(f.c, 2.0, 1e-12);
  for (double r : f.residuals) EXPECT_NEAR(r, 0.0, 1e-12);
  // y = (1, 1, 1) at x = (1, 2, 4): c = sum(y/x) / sum(1/x^2) = 1.75 / 1.3125
  const auto g = fit_inverse(std::vector<double>{1, 2, 4}, std::vector<double>{1, 1, 1});
  EXPECT_NEAR(g.c, 1.75 / 1.3125, 1e-12);
  EXPECT_NEAR(g.residuals[0], 1 - g.c, 1e-12);
}

TEST(Series, HellingerSeriesLengthsMustMatch) {
  const auto s = marked_series({0.1, 0.2});
  const auto t = marked_series({0.1});
  EXPECT_THROW(hellinger_series(s, t), DomainError);
  const auto h = hellinger_series(s, s);
  EXPECT_EQ(h.values, (std::vector<double>{1.0, 1.0}));
}
