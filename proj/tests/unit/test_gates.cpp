#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qcawalk/errors.hpp"
#include "qcawalk/gates.hpp"

using namespace qcaw;
using std::numbers::pi;

namespace {

const Complex I{0.0, 1.0};

StateVector random_state(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  std::vector<Complex> a(std::size_t{1} << n);
  for (auto& x : a) x = {g(gen), g(gen)};
  StateVector psi(n, a);
  psi.normalize();
  return psi;
}

// Full-register matrix of a two-qubit gate, element by element.
Eigen::MatrixXcd embed2(const Matrix4& u, int qa, int qb, int n) {
  const int d = 1 << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  const int mask = (1 << qa) | (1 << qb);
  for (int x = 0; x < d; ++x) {
    for (int y = 0; y < d; ++y) {
      if ((x & ~mask) != (y & ~mask)) continue;
      const int lx = 2 * ((x >> qa) & 1) + ((x >> qb) & 1);
      const int ly = 2 * ((y >> qa) & 1) + ((y >> qb) & 1);
      m(x, y) = u(lx, ly);
    }
  }
  return m;
}

Eigen::VectorXcd as_vector(const StateVector& psi) {
  return Eigen::Map<const Eigen::VectorXcd>(psi.amplitudes().data(),
                                            static_cast<Eigen::Index>(psi.size()));
}

}  // namespace

TEST(XyGate, IswapAndSqrtIswapEntries) {
  Matrix4 iswap;
  iswap << 1, 0, 0, 0,
           0, 0, I, 0,
           0, I, 0, 0,
           0, 0, 0, 1;
  const double r = 1 / std::sqrt(2.0);
  Matrix4 sqrt_iswap;
  sqrt_iswap << 1, 0, 0, 0,
                0, r, I * r, 0,
                0, I * r, r, 0,
                0, 0, 0, 1;
  EXPECT_LT((xy_gate(pi / 2) - iswap).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((xy_gate(pi / 4) - sqrt_iswap).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((xy_gate(pi / 4) * xy_gate(pi / 4) - iswap).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((xy_gate(0) - Matrix4::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(XyGate, Unitary) {
  for (double th : {0.1, 0.7, pi / 3, -1.2}) {
    const Matrix4 u = xy_gate(th);
    EXPECT_LT((u.adjoint() * u - Matrix4::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Rotations, MatchDefinitions) {
  Matrix2 x;
  x << 0, 1, 1, 0;
  EXPECT_LT((pauli_rotation(PauliAxis::x, pi) - (-I) * x).cwiseAbs().maxCoeff(), 1e-15);
  Matrix2 rz;
  rz << std::exp(-I * 0.3), 0, 0, std::exp(I * 0.3);
  EXPECT_LT((pauli_rotation(PauliAxis::z, 0.6) - rz).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GateSpec, GeneratorReproducesUnitary) {
  const GateTiming timing;
  for (double th : {pi / 4, pi / 2, -pi / 4, 0.37}) {
    const auto g = make_xy(0, 1, th, timing);
    EXPECT_NEAR(g.duration, std::abs(th) / timing.gamma, 1e-20);
    const Eigen::MatrixXcd u = (-I * g.generator * g.duration).exp();
    EXPECT_LT((u - g.unitary()).cwiseAbs().maxCoeff(), 1e-12) << th;
  }
  for (auto axis : {PauliAxis::x, PauliAxis::y}) {
    const auto g = make_rotation(axis, 0, 0.9, timing);
    EXPECT_DOUBLE_EQ(g.duration, timing.single_qubit_duration);
    const Eigen::MatrixXcd u = (-I * g.generator * g.duration).exp();
    EXPECT_LT((u - g.unitary()).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto rz = make_rotation(PauliAxis::z, 0, -pi / 2, timing);
  EXPECT_EQ(rz.duration, 0.0);
  EXPECT_EQ(rz.generator.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GateSpec, DurationsScaleWithAngle) {
  const auto a = make_xy(0, 1, pi / 4);
  const auto b = make_xy(0, 1, pi / 2);
  EXPECT_NEAR(a.duration, 25e-9, 1e-18);
  EXPECT_NEAR(b.duration, 2 * a.duration, 1e-18);
  EXPECT_EQ(a.name(), "sqrt_iswap");
  EXPECT_EQ(b.name(), "iswap");
}

TEST(Kernels, TwoQubitMatchesFullMatrix) {
  const int n = 5;
  const Matrix4 u = xy_gate(0.83);
  Matrix4 generic;  // not XY-symmetric, catches qa/qb swaps
  generic << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, I;
  for (const Matrix4& g : {u, generic}) {
    for (auto [qa, qb] : {std::pair{0, 1}, {3, 1}, {4, 0}, {2, 4}}) {
      StateVector psi = random_state(n, 11);
      const Eigen::VectorXcd expect = embed2(g, qa, qb, n) * as_vector(psi);
      apply_two_qubit(psi, g, qa, qb);
      EXPECT_LT((as_vector(psi) - expect).cwiseAbs().maxCoeff(), 1e-12) << qa << "," << qb;
    }
  }
}

TEST(Kernels, SingleQubitMatchesFullMatrix) {
  const int n = 4;
  Matrix2 g;
  g << 1, 2, I, 3;
  for (int q = 0; q < n; ++q) {
    StateVector psi = random_state(n, 5);
    const int d = 1 << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int x = 0; x < d; ++x) {
      for (int y = 0; y < d; ++y) {
        if ((x & ~(1 << q)) == (y & ~(1 << q))) m(x, y) = g((x >> q) & 1, (y >> q) & 1);
      }
    }
    const Eigen::VectorXcd expect = m * as_vector(psi);
    apply_single_qubit(psi, g, q);
    EXPECT_LT((as_vector(psi) - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Kernels, IswapMovesExcitationWithPhase) {
  StateVector psi = StateVector::basis(3, 0b001);
  apply_gate(psi, make_xy(0, 2, pi / 2));
  EXPECT_NEAR(std::abs(psi[0b100] - I), 0.0, 1e-15);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-12);
}

TEST(Kernels, RejectsBadTargets) {
  StateVector psi(3);
  EXPECT_THROW(apply_two_qubit(psi, xy_gate(1.0), 1, 1), DomainError);
  EXPECT_THROW(apply_single_qubit(psi, pauli(PauliAxis::x), 3), DomainError);
}
