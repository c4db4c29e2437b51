#include "qcawalk/gates.hpp"

#include <cmath>

#include "qcawalk/errors.hpp"

namespace qcaw {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_angle(double theta) {
  if (!std::isfinite(theta)) throw DomainError("gate angle must be finite");
}

void check_qubit(const StateVector& psi, int q) {
  if (q < 0 || q >= psi.n_qubits()) {
    throw DomainError("qubit " + std::to_string(q) + " out of range");
  }
}

// Inserts a zero bit at position `pos` of x.
inline std::size_t insert_zero(std::size_t x, int pos) noexcept {
  const std::size_t low = x & ((std::size_t{1} << pos) - 1);
  return ((x >> pos) << (pos + 1)) | low;
}

}  // namespace

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::rx:
      return "rx";
    case GateKind::ry:
      return "ry";
    case GateKind::rz:
      return "rz";
    case GateKind::xy:
      return "xy";
  }
  return "?";
}

Matrix2 pauli(PauliAxis axis) {
  Matrix2 m;
  switch (axis) {
    case PauliAxis::x:
      m << 0, 1, 1, 0;
      break;
    case PauliAxis::y:
      m << 0, -kI, kI, 0;
      break;
    case PauliAxis::z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

Matrix2 pauli_rotation(PauliAxis axis, double theta) {
  check_angle(theta);
  return std::cos(theta / 2) * Matrix2::Identity() - kI * std::sin(theta / 2) * pauli(axis);
}

Matrix4 xy_gate(double theta) {
  check_angle(theta);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix4 u = Matrix4::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = c;
  u(1, 2) = kI * s;
  u(2, 1) = kI * s;
  u(2, 2) = c;
  u(3, 3) = 1.0;
  return u;
}

Eigen::MatrixXcd GateSpec::unitary() const {
  switch (kind) {
    case GateKind::rx:
      return pauli_rotation(PauliAxis::x, angle);
    case GateKind::ry:
      return pauli_rotation(PauliAxis::y, angle);
    case GateKind::rz:
      return pauli_rotation(PauliAxis::z, angle);
    case GateKind::xy:
      return xy_gate(angle);
  }
  return {};
}

std::string GateSpec::name() const {
  if (kind == GateKind::xy) {
    if (std::abs(angle - std::numbers::pi / 4) < 1e-12) return "sqrt_iswap";
    if (std::abs(angle - std::numbers::pi / 2) < 1e-12) return "iswap";
  }
  return to_string(kind);
}

GateSpec make_xy(int qa, int qb, double theta, const GateTiming& timing) {
  check_angle(theta);
  if (qa == qb) throw DomainError("two-qubit gate needs distinct qubits");
  if (!(timing.gamma > 0.0)) throw DomainError("coupling gamma must be positive");
  GateSpec g;
  g.kind = GateKind::xy;
  g.angle = theta;
  g.targets = {qa, qb};
  g.duration = std::abs(theta) / timing.gamma;
  // (XX + YY)/2 acts as sigma_x on the {|01>, |10>} block; exp(i theta sigma_x)
  // gives the XY matrix, so H = -sign(theta) * gamma * (XX + YY)/2.
  Eigen::MatrixXcd hop = Eigen::MatrixXcd::Zero(4, 4);
  hop(1, 2) = 1.0;
  hop(2, 1) = 1.0;
  g.generator = theta == 0.0 ? Eigen::MatrixXcd::Zero(4, 4)
                             : Eigen::MatrixXcd(-std::copysign(timing.gamma, theta) * hop);
  return g;
}

GateSpec make_rotation(PauliAxis axis, int qubit, double theta, const GateTiming& timing) {
  check_angle(theta);
  GateSpec g;
  g.angle = theta;
  g.targets = {qubit, qubit};
  switch (axis) {
    case PauliAxis::x:
      g.kind = GateKind::rx;
      break;
    case PauliAxis::y:
      g.kind = GateKind::ry;
      break;
    case PauliAxis::z:
      g.kind = GateKind::rz;
      break;
  }
  if (axis == PauliAxis::z || theta == 0.0) {
    g.duration = 0.0;
    g.generator = Eigen::MatrixXcd::Zero(2, 2);
  } else {
    if (!(timing.single_qubit_duration > 0.0)) {
      throw DomainError("single-qubit gate duration must be positive");
    }
    g.duration = timing.single_qubit_duration;
    g.generator = (theta / (2.0 * g.duration)) * pauli(axis);
  }
  return g;
}

void apply_single_qubit(StateVector& psi, const Matrix2& gate, int q) {
  check_qubit(psi, q);
  auto amps = psi.amplitudes();
  const std::size_t half = amps.size() >> 1;
  const std::size_t bit = std::size_t{1} << q;
  const Complex g00 = gate(0, 0), g01 = gate(0, 1), g10 = gate(1, 0), g11 = gate(1, 1);
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t i0 = insert_zero(k, q);
    const std::size_t i1 = i0 | bit;
    const Complex a0 = amps[i0];
    const Complex a1 = amps[i1];
    amps[i0] = g00 * a0 + g01 * a1;
    amps[i1] = g10 * a0 + g11 * a1;
  }
}

void apply_two_qubit(StateVector& psi, const Matrix4& gate, int qa, int qb) {
  check_qubit(psi, qa);
  check_qubit(psi, qb);
  if (qa == qb) throw DomainError("two-qubit gate needs distinct qubits");
  auto amps = psi.amplitudes();
  const int lo = std::min(qa, qb);
  const int hi = std::max(qa, qb);
  const std::size_t ba = std::size_t{1} << qa;
  const std::size_t bb = std::size_t{1} << qb;
  const std::size_t quarter = amps.size() >> 2;
  for (std::size_t k = 0; k < quarter; ++k) {
    const std::size_t i00 = insert_zero(insert_zero(k, lo), hi);
    const std::size_t idx[4] = {i00, i00 | bb, i00 | ba, i00 | ba | bb};
    const Complex in[4] = {amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      amps[idx[r]] = gate(r, 0) * in[0] + gate(r, 1) * in[1] + gate(r, 2) * in[2] +
                     gate(r, 3) * in[3];
    }
  }
}

void apply_gate(StateVector& psi, const GateSpec& gate) {
  if (gate.arity() == 2) {
    apply_two_qubit(psi, Matrix4(gate.unitary()), gate.targets[0], gate.targets[1]);
  } else {
    apply_single_qubit(psi, Matrix2(gate.unitary()), gate.targets[0]);
  }
}

}  // namespace qcaw
