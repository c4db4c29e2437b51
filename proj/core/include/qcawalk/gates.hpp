#pragma once

#include <array>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "qcawalk/state.hpp"

namespace qcaw {

using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

enum class PauliAxis { x, y, z };
enum class GateKind { rx, ry, rz, xy };

std::string to_string(GateKind kind);

/// Pauli matrix; sigma_z = diag(1, -1) in the {|0>, |1>} basis.
Matrix2 pauli(PauliAxis axis);

/// exp(-i theta sigma_axis / 2)
Matrix2 pauli_rotation(PauliAxis axis, double theta);

/// XY gate in the basis |q_a q_b> = |00>, |01>, |10>, |11>:
/// [[1,0,0,0],[0,c,is,0],[0,is,c,0],[0,0,0,1]]. theta = pi/4 is sqrt(iSWAP),
/// theta = pi/2 is iSWAP.
Matrix4 xy_gate(double theta);

/// Hardware timing that turns gate angles into durations and generators.
/// XY(theta) runs for |theta|/gamma; RX/RY take a fixed duration; RZ is
/// instantaneous.
struct GateTiming {
  double gamma = std::numbers::pi / (4.0 * 25e-9);  // sqrt(iSWAP) in 25 ns
  double single_qubit_duration = 8e-9;
};

/// One native gate instance. `generator` is the Hamiltonian H (rad/s) with
/// unitary() == exp(-i H duration); zero-duration gates carry a zero generator.
struct GateSpec {
  GateKind kind = GateKind::xy;
  double angle = 0.0;
  std::array<int, 2> targets{0, 0};
  double duration = 0.0;
  Eigen::MatrixXcd generator;

  int arity() const noexcept { return kind == GateKind::xy ? 2 : 1; }
  Eigen::MatrixXcd unitary() const;
  std::string name() const;
};

GateSpec make_xy(int qa, int qb, double theta, const GateTiming& timing = {});
GateSpec make_rotation(PauliAxis axis, int qubit, double theta, const GateTiming& timing = {});

/// In-place single-qubit gate on `q`.
void apply_single_qubit(StateVector& psi, const Matrix2& gate, int q);

/// In-place two-qubit gate; the 4x4 index is 2*bit(qa) + bit(qb).
void apply_two_qubit(StateVector& psi, const Matrix4& gate, int qa, int qb);

void apply_gate(StateVector& psi, const GateSpec& gate);

}  // namespace qcaw
