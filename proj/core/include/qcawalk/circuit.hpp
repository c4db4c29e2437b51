#pragma once

#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcawalk/gates.hpp"
#include "qcawalk/lattice.hpp"
#include "qcawalk/state.hpp"

namespace qcaw {

/// Gates that run in the same time slot, listed in application order. A qubit
/// may appear in several gates (e.g. an XY followed by an RZ correction); those
/// run back to back.
struct Layer {
  std::string label;
  std::vector<GateSpec> gates;

  /// Sum of gate durations per qubit.
  std::vector<double> busy_time(int n_qubits) const;
  /// Longest per-qubit busy time.
  double duration(int n_qubits) const;
  int two_qubit_gate_count() const;
};

using Circuit = std::vector<Layer>;

enum class Variant { walk, search };

std::string to_string(Variant v);

/// Per-edge XY angles. `marked` selects the search rule: edges incident to the
/// marked vertex use `marked_theta`, all others `default_theta`.
struct AngleSchedule {
  double default_theta = std::numbers::pi / 4;
  double marked_theta = std::numbers::pi / 4;
  std::optional<int> marked;
  std::map<VertexPair, double> overrides;  // keyed by (min, max)

  static AngleSchedule walk(double theta = std::numbers::pi / 4);
  static AngleSchedule search(int marked_vertex);

  bool touches_marked(const VertexPair& pair) const noexcept;
  double angle_for(const VertexPair& pair) const;
};

/// One QCA time step: the tessellation layers in application order.
struct StepOperator {
  Variant variant = Variant::walk;
  std::optional<int> marked;
  std::vector<Layer> layers;

  int two_qubit_gate_count() const;
};

/// Walk: every tessellation pair gets XY(schedule angle). Search: pairs touching
/// the marked vertex get XY(marked angle); every other pair gets XY(default)
/// followed by RZ(-pi/2) on both of its qubits.
StepOperator build_step_operator(const Lattice& lattice, const AngleSchedule& schedule,
                                 Variant variant, const GateTiming& timing = {});

void apply_layer(StateVector& psi, const Layer& layer);
void apply_circuit(StateVector& psi, std::span<const Layer> layers);
void apply_step(StateVector& psi, const StepOperator& step);

}  // namespace qcaw
