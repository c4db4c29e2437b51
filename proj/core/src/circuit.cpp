#include "qcawalk/circuit.hpp"

#include <algorithm>
#include <cmath>

#include "qcawalk/errors.hpp"

namespace qcaw {

std::vector<double> Layer::busy_time(int n_qubits) const {
  std::vector<double> busy(static_cast<std::size_t>(n_qubits), 0.0);
  for (const auto& g : gates) {
    busy.at(static_cast<std::size_t>(g.targets[0])) += g.duration;
    if (g.arity() == 2) busy.at(static_cast<std::size_t>(g.targets[1])) += g.duration;
  }
  return busy;
}

double Layer::duration(int n_qubits) const {
  const auto busy = busy_time(n_qubits);
  return busy.empty() ? 0.0 : *std::max_element(busy.begin(), busy.end());
}

int Layer::two_qubit_gate_count() const {
  return static_cast<int>(
      std::count_if(gates.begin(), gates.end(), [](const GateSpec& g) { return g.arity() == 2; }));
}

std::string to_string(Variant v) { return v == Variant::walk ? "walk" : "search"; }

AngleSchedule AngleSchedule::walk(double theta) {
  AngleSchedule s;
  s.default_theta = theta;
  return s;
}

AngleSchedule AngleSchedule::search(int marked_vertex) {
  AngleSchedule s;
  s.default_theta = std::numbers::pi / 2;
  s.marked_theta = std::numbers::pi / 4;
  s.marked = marked_vertex;
  return s;
}

bool AngleSchedule::touches_marked(const VertexPair& pair) const noexcept {
  return marked && (pair.first == *marked || pair.second == *marked);
}

double AngleSchedule::angle_for(const VertexPair& pair) const {
  const VertexPair key{std::min(pair.first, pair.second), std::max(pair.first, pair.second)};
  double theta = default_theta;
  if (const auto it = overrides.find(key); it != overrides.end()) {
    theta = it->second;
  } else if (touches_marked(pair)) {
    theta = marked_theta;
  }
  if (!std::isfinite(theta)) throw DomainError("schedule angle must be finite");
  return theta;
}

int StepOperator::two_qubit_gate_count() const {
  int n = 0;
  for (const auto& l : layers) n += l.two_qubit_gate_count();
  return n;
}

StepOperator build_step_operator(const Lattice& lattice, const AngleSchedule& schedule,
                                 Variant variant, const GateTiming& timing) {
  if (variant == Variant::search) {
    if (!schedule.marked) throw DomainError("search variant needs a marked vertex");
    if (!lattice.contains(*schedule.marked)) {
      throw DomainError("marked vertex " + std::to_string(*schedule.marked) + " out of range");
    }
  }
  StepOperator op;
  op.variant = variant;
  if (variant == Variant::search) op.marked = schedule.marked;

  for (const auto& tess : build_tessellations(lattice)) {
    Layer layer{tess.label, {}};
    for (const auto& pair : tess.pairs) {
      const auto [a, b] = pair;
      layer.gates.push_back(make_xy(a, b, schedule.angle_for(pair), timing));
      if (variant == Variant::search && !schedule.touches_marked(pair)) {
        layer.gates.push_back(make_rotation(PauliAxis::z, a, -std::numbers::pi / 2, timing));
        layer.gates.push_back(make_rotation(PauliAxis::z, b, -std::numbers::pi / 2, timing));
      }
    }
    op.layers.push_back(std::move(layer));
  }
  return op;
}

void apply_layer(StateVector& psi, const Layer& layer) {
  for (const auto& g : layer.gates) apply_gate(psi, g);
}

void apply_circuit(StateVector& psi, std::span<const Layer> layers) {
  for (const auto& l : layers) apply_layer(psi, l);
}

void apply_step(StateVector& psi, const StepOperator& step) { apply_circuit(psi, step.layers); }

}  // namespace qcaw
