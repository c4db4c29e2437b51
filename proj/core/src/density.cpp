#include "qcawalk/noise.hpp"

#include <algorithm>
#include <array>

#include "qcawalk/errors.hpp"

namespace qcaw {

namespace {

std::size_t insert_zeros(std::size_t k, std::span<const int> sorted_bits) {
  for (const int b : sorted_bits) {
    const std::size_t low = k & ((std::size_t{1} << b) - 1);
    k = ((k >> b) << (b + 1)) | low;
  }
  return k;
}

template <int D>
void apply_block(Eigen::MatrixXcd& m, const Eigen::MatrixXcd& s,
                 const std::array<std::size_t, D>& off, std::span<const int> sorted) {
  const auto dim = static_cast<std::size_t>(m.rows());
  const std::size_t nbases = dim >> sorted.size();
  std::vector<std::size_t> bases(nbases);
  for (std::size_t k = 0; k < nbases; ++k) bases[k] = insert_zeros(k, sorted);

  Complex* data = m.data();
  Eigen::Matrix<Complex, D * D, 1> v;
  Eigen::Matrix<Complex, D * D, D * D> sup = s;
  for (const std::size_t cb : bases) {
    for (const std::size_t rb : bases) {
      for (int j = 0; j < D; ++j) {
        for (int i = 0; i < D; ++i) v(i + D * j) = data[(rb + off[i]) + dim * (cb + off[j])];
      }
      const Eigen::Matrix<Complex, D * D, 1> w = sup * v;
      for (int j = 0; j < D; ++j) {
        for (int i = 0; i < D; ++i) data[(rb + off[i]) + dim * (cb + off[j])] = w(i + D * j);
      }
    }
  }
}

}  // namespace

void apply_local_channel(DensityMatrix& rho, const GateChannel& channel,
                         std::span<const int> qubits) {
  const int n = rho.n_qubits();
  for (const int q : qubits) {
    if (q < 0 || q >= n) throw DomainError("channel target out of range");
  }
  if (qubits.size() == 1 && channel.dim() == 2) {
    const std::array<int, 1> sorted{qubits[0]};
    const std::array<std::size_t, 2> off{0, std::size_t{1} << qubits[0]};
    apply_block<2>(rho.matrix(), channel.superoperator(), off, sorted);
    return;
  }
  if (qubits.size() == 2 && channel.dim() == 4) {
    const int qa = qubits[0];
    const int qb = qubits[1];
    if (qa == qb) throw DomainError("two-qubit channel needs distinct qubits");
    std::array<int, 2> sorted{qa, qb};
    std::sort(sorted.begin(), sorted.end());
    const std::size_t a = std::size_t{1} << qa;
    const std::size_t b = std::size_t{1} << qb;
    // local index 2*bit(qa) + bit(qb)
    const std::array<std::size_t, 4> off{0, b, a, a | b};
    apply_block<4>(rho.matrix(), channel.superoperator(), off, sorted);
    return;
  }
  throw DomainError("channel arity does not match target count");
}

DensityEvolver::DensityEvolver(NoiseModel noise, int qubit_cap)
    : noise_(noise), cap_(qubit_cap) {
  noise_.validate();
}

const GateChannel& DensityEvolver::channel_for(const GateSpec& gate) {
  const auto key = std::make_tuple(static_cast<int>(gate.kind), gate.angle, gate.duration);
  auto it = gate_cache_.find(key);
  if (it == gate_cache_.end()) {
    it = gate_cache_.emplace(key, noisy_gate_channel(gate, noise_)).first;
  }
  return it->second;
}

const GateChannel& DensityEvolver::idle_for(double duration) {
  auto it = idle_cache_.find(duration);
  if (it == idle_cache_.end()) it = idle_cache_.emplace(duration, idle_channel(duration, noise_)).first;
  return it->second;
}

void DensityEvolver::apply_layer(DensityMatrix& rho, const Layer& layer) {
  const int n = rho.n_qubits();
  if (n > cap_) {
    throw ResourceError("density backend limited to " + std::to_string(cap_) + " qubits, got " +
                        std::to_string(n) + "; use the trajectories backend");
  }
  for (const auto& gate : layer.gates) {
    const auto& ch = channel_for(gate);
    const std::span<const int> targets(gate.targets.data(), static_cast<std::size_t>(gate.arity()));
    apply_local_channel(rho, ch, targets);
  }
  if (!noise_.idle_decay || noise_.is_noiseless()) return;
  const auto busy = layer.busy_time(n);
  const double total = *std::max_element(busy.begin(), busy.end());
  for (int q = 0; q < n; ++q) {
    const double idle = total - busy[static_cast<std::size_t>(q)];
    if (idle <= 1e-12 * total) continue;
    const std::array<int, 1> t{q};
    apply_local_channel(rho, idle_for(idle), t);
  }
}

void DensityEvolver::apply_circuit(DensityMatrix& rho, std::span<const Layer> layers) {
  for (const auto& layer : layers) apply_layer(rho, layer);
}

DensityMatrix evolve_density(const DensityMatrix& rho, const StepOperator& step,
                             const NoiseModel& noise, int qubit_cap) {
  DensityEvolver ev(noise, qubit_cap);
  DensityMatrix out = rho;
  ev.apply_circuit(out, step.layers);
  return out;
}

}  // namespace qcaw
