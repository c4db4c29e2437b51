#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "qcawalk/errors.hpp"
#include "qcawalk/rng.hpp"
#include "qcawalk/state.hpp"

using namespace qcaw;

TEST(OneHot, SingleBitAtVertex) {
  EXPECT_EQ(onehot_index(0, 4), 0b0001u);
  EXPECT_EQ(onehot_index(3, 4), 0b1000u);
}

TEST(OneHot, RoundTrip) {
  for (int n = 1; n <= 20; ++n) {
    for (int v = 0; v < n; ++v) {
      const auto idx = onehot_index(v, n);
      EXPECT_EQ(std::popcount(idx), 1);
      EXPECT_EQ(decode_onehot(idx, n), v);
    }
  }
  EXPECT_FALSE(decode_onehot(0b0110, 4));
  EXPECT_FALSE(decode_onehot(0, 4));
}

TEST(OneHot, OutOfRangeThrows) {
  EXPECT_THROW(onehot_index(4, 4), DomainError);
  EXPECT_THROW(onehot_index(-1, 4), DomainError);
}

TEST(StateVector, StartsInVacuumAndChecksLength) {
  StateVector psi(3);
  EXPECT_EQ(psi.size(), 8u);
  EXPECT_DOUBLE_EQ(std::norm(psi[0]), 1.0);
  EXPECT_THROW(StateVector(3, std::vector<Complex>(7)), DomainError);
  EXPECT_THROW(StateVector(0), DomainError);
}

TEST(SectorProject, SplitsSectorAndLeakage) {
  std::vector<Complex> a(16, 0.0);
  a[0] = std::sqrt(0.1);             // vacuum
  a[0b0010] = std::sqrt(0.3);        // vertex 1
  a[0b1000] = Complex(0, std::sqrt(0.4));  // vertex 3
  a[0b0011] = std::sqrt(0.2);        // two particles
  const StateVector psi(4, a);
  const auto s = sector_project(psi, 4);
  ASSERT_EQ(s.vertex_count(), 4);
  EXPECT_NEAR(std::norm(s.amplitudes[1]), 0.3, 1e-15);
  EXPECT_NEAR(s.amplitudes[3].imag(), std::sqrt(0.4), 1e-15);
  EXPECT_NEAR(s.leakage_norm, 0.3, 1e-12);
  double total = s.leakage_norm;
  for (auto x : s.amplitudes) total += std::norm(x);
  EXPECT_NEAR(total, psi.norm_squared(), 1e-12);
}

TEST(Distribution, ExactValidates) {
  EXPECT_THROW(Distribution::exact({{Outcome::vertex(0), 0.7}}), DomainError);
  EXPECT_THROW(Distribution::exact({{Outcome::vertex(0), 1.2}, {Outcome::vertex(1), -0.2}}),
               DomainError);
  const auto d = Distribution::exact({{Outcome::vertex(0), 0.25}, {Outcome::leakage(), 0.75}});
  EXPECT_DOUBLE_EQ(d.prob(Outcome::leakage()), 0.75);
  EXPECT_DOUBLE_EQ(d.prob(Outcome::vertex(5)), 0.0);
  EXPECT_FALSE(d.is_empirical());
}

TEST(Distribution, VertexAggregationCollectsLeakage) {
  std::vector<double> p(16, 0.0);
  p[0] = 0.1;
  p[0b0100] = 0.5;
  p[0b0110] = 0.4;
  const auto d = vertex_distribution(p, 4, 4);
  EXPECT_DOUBLE_EQ(d.prob(Outcome::vertex(2)), 0.5);
  EXPECT_NEAR(d.prob(Outcome::leakage()), 0.5, 1e-15);
  const auto b = bitstring_distribution(p, 4);
  EXPECT_DOUBLE_EQ(b.prob(Outcome::bitstring(0b0110)), 0.4);
  EXPECT_EQ(Outcome::bitstring(0b0110).label(4), "0110");
}

TEST(Outcome, LabelsRoundTrip) {
  EXPECT_EQ(Outcome::vertex(12).label(), "12");
  EXPECT_EQ(Outcome::parse("12"), Outcome::vertex(12));
  EXPECT_EQ(Outcome::parse("leakage"), Outcome::leakage());
  EXPECT_EQ(Outcome::parse("0110", true), Outcome::bitstring(6));
  EXPECT_THROW(Outcome::parse("1x"), DomainError);
}

TEST(Sampling, DeterministicAndExactTotals) {
  const auto d = Distribution::exact(
      {{Outcome::vertex(0), 0.5}, {Outcome::vertex(1), 0.3}, {Outcome::leakage(), 0.2}});
  const auto a = sample_counts(d, 10000, 42);
  const auto b = sample_counts(d, 10000, 42);
  EXPECT_EQ(a.counts(), b.counts());
  ASSERT_TRUE(a.is_empirical());
  EXPECT_EQ(*a.shots(), 10000u);
  std::uint64_t sum = 0;
  for (const auto& [o, c] : a.counts()) sum += c;
  EXPECT_EQ(sum, 10000u);
  EXPECT_DOUBLE_EQ(a.total(), 1.0);
  // 5 sigma of a binomial(10000, 0.5)
  EXPECT_NEAR(a.prob(Outcome::vertex(0)), 0.5, 0.025);
  EXPECT_NE(sample_counts(d, 10000, 43).counts(), a.counts());
  EXPECT_THROW(sample_counts(d, 0, 1), DomainError);
}

TEST(Sampling, TinyProbabilitiesNeverSampled) {
  const auto d = Distribution::exact({{Outcome::vertex(0), 1.0 - 1e-16}, {Outcome::vertex(1), 1e-16}});
  const auto s = sample_counts(d, 100000, 3);
  EXPECT_EQ(s.counts().count(Outcome::vertex(1)), 0u);
}

TEST(Rng, DerivedSeedsDifferByTagAndIndex) {
  EXPECT_EQ(derive_seed(1, StreamTag::shots, 0), derive_seed(1, StreamTag::shots, 0));
  EXPECT_NE(derive_seed(1, StreamTag::shots, 0), derive_seed(1, StreamTag::shots, 1));
  EXPECT_NE(derive_seed(1, StreamTag::shots, 0), derive_seed(1, StreamTag::trajectory, 0));
  EXPECT_NE(derive_seed(1, StreamTag::shots, 0), derive_seed(2, StreamTag::shots, 0));
}

TEST(DensityMatrix, PureStateProperties) {
  std::vector<Complex> a(4, 0.0);
  a[1] = 1 / std::sqrt(2.0);
  a[2] = Complex(0, 1 / std::sqrt(2.0));
  const auto rho = DensityMatrix::from_state(StateVector(2, a));
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-15);
  EXPECT_LT(rho.hermiticity_defect(), 1e-15);
  EXPECT_GT(rho.min_eigenvalue(), -1e-12);
  EXPECT_NEAR(rho.diagonal_probabilities()[2], 0.5, 1e-15);
}
