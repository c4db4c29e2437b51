#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "qcawalk/circuit.hpp"
#include "qcawalk/gates.hpp"
#include "qcawalk/state.hpp"

namespace qcaw {

/// Markovian noise acting during every gate and idle interval:
///   drho/dt = -i[H, rho] + K sum_i D[sigma_-^(i)](rho) + delta sum_i D[sigma_z^(i)](rho)
/// with D[A](rho) = A rho A^dag - 1/2 {A^dag A, rho}. Under D[sigma_z] alone an
/// off-diagonal coherence decays as exp(-2 delta t).
struct NoiseModel {
  double relaxation_rate = 0.0;  // K, 1/s
  double dephasing_rate = 0.0;   // delta, 1/s
  double gamma = GateTiming{}.gamma;
  double single_qubit_duration = GateTiming{}.single_qubit_duration;
  bool idle_decay = true;  // decay qubits left idle within a layer

  GateTiming timing() const { return {gamma, single_qubit_duration}; }
  bool is_noiseless() const noexcept { return relaxation_rate == 0.0 && dephasing_rate == 0.0; }
  /// Throws DomainError unless K >= 0, delta >= 0, gamma > 0, duration > 0.
  void validate() const;
};

/// sigma_- = |0><1| and sigma_z on qubit q of an n-qubit register (dense).
Eigen::MatrixXcd lowering_operator(int q, int n_qubits);
Eigen::MatrixXcd dephasing_operator(int q, int n_qubits);

/// Right-hand side of the master equation for an n-qubit rho and Hamiltonian H.
Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& hamiltonian,
                              const NoiseModel& noise);

/// Liouvillian superoperator (column-stacking vec) on `n_local` qubits.
Eigen::MatrixXcd liouvillian(const Eigen::MatrixXcd& hamiltonian, const NoiseModel& noise,
                             int n_local);

/// CPTP map on 1 or 2 qubits, stored as a column-stacking superoperator
/// S with vec(E(rho)) = S vec(rho).
class GateChannel {
 public:
  GateChannel(Eigen::MatrixXcd ideal, Eigen::MatrixXcd superop);

  static GateChannel unitary(const Eigen::MatrixXcd& u);

  int dim() const noexcept { return static_cast<int>(ideal_.rows()); }
  const Eigen::MatrixXcd& ideal() const noexcept { return ideal_; }
  const Eigen::MatrixXcd& superoperator() const noexcept { return superop_; }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  /// Choi matrix J = sum_ij |i><j| (x) E(|i><j|).
  Eigen::MatrixXcd choi() const;
  std::vector<Eigen::MatrixXcd> kraus(double cutoff = 1e-14) const;
  /// max |sum_k K_k^dag K_k - I|
  double trace_preservation_defect() const;
  double choi_min_eigenvalue() const;

 private:
  Eigen::MatrixXcd ideal_;
  Eigen::MatrixXcd superop_;
};

/// Integrates the master equation with the gate's generator held fixed over its
/// duration (matrix exponential of the local Liouvillian).
GateChannel noisy_gate_channel(const GateSpec& gate, const NoiseModel& noise);

/// Pure dissipation of one qubit left idle for `duration`.
GateChannel idle_channel(double duration, const NoiseModel& noise);

/// Tr(S_ideal^dag S) / d^2
double process_fidelity(const GateChannel& channel);
/// (d F_pro + 1) / (d + 1)
double average_gate_fidelity(const GateChannel& channel);

// ------------------------------------------------------------ density backend

inline constexpr int kDefaultDensityCap = 12;

/// Applies layers to a density matrix with per-gate channels and idle decay.
/// Channels are cached by (gate kind, angle, duration).
class DensityEvolver {
 public:
  explicit DensityEvolver(NoiseModel noise, int qubit_cap = kDefaultDensityCap);

  void apply_layer(DensityMatrix& rho, const Layer& layer);
  void apply_circuit(DensityMatrix& rho, std::span<const Layer> layers);

  const NoiseModel& noise() const noexcept { return noise_; }

 private:
  const GateChannel& channel_for(const GateSpec& gate);
  const GateChannel& idle_for(double duration);

  NoiseModel noise_;
  int cap_;
  std::map<std::tuple<int, double, double>, GateChannel> gate_cache_;
  std::map<double, GateChannel> idle_cache_;
};

/// Applies `channel` to `qubits` (1 or 2, first qubit most significant locally).
void apply_local_channel(DensityMatrix& rho, const GateChannel& channel, std::span<const int> qubits);

DensityMatrix evolve_density(const DensityMatrix& rho, const StepOperator& step,
                             const NoiseModel& noise, int qubit_cap = kDefaultDensityCap);

// --------------------------------------------------------- trajectory backend

struct TrajectoryRequest {
  int steps = 1;
  std::uint64_t n_traj = 1000;
  std::uint64_t seed = 0;
  int vertex_count = 0;  // 0 = n_qubits
  bool record_bitstrings = false;
  int workers = 1;
  bool allow_sector = true;  // use the n+1 amplitude register when dynamics allow
};

struct TrajectoryResult {
  /// Averaged vertex + leakage distribution after the prep circuit (index 0)
  /// and after each step.
  std::vector<Distribution> per_step;
  /// Averaged basis-state probabilities, filled when record_bitstrings is set.
  std::vector<std::vector<double>> basis_probs;
  std::uint64_t total_jumps = 0;
  std::uint64_t sector_trajectories = 0;  // trajectories run on the compact register
};

/// Quantum-jump unraveling: per gate (and idle) interval the state drifts
/// under H - i/2 sum L^dag L with L in {sqrt(K) sigma_-, sqrt(delta) sigma_z};
/// jump times are drawn exactly within each interval. Trajectory k uses the
/// RNG stream derive_seed(seed, trajectory, k).
TrajectoryResult trajectory_run(const StateVector& init, std::span<const Layer> prep,
                                const StepOperator& step, const NoiseModel& noise,
                                const TrajectoryRequest& request);

/// Averaged vertex distribution after a single application of `step`.
Distribution trajectory_run(const StateVector& init, const StepOperator& step,
                            const NoiseModel& noise, std::uint64_t n_traj, std::uint64_t seed);

// ---------------------------------------------------------------- calibration

/// Gate fidelity table of the emulated device.
std::map<std::string, double> reference_gate_fidelities();

/// Average gate fidelity of a named native gate ("sqrt_iswap", "iswap", "rx",
/// "ry", "rz") under `noise`.
double native_gate_fidelity(const std::string& gate, const NoiseModel& noise);

struct CalibrationResult {
  NoiseModel model;
  std::map<std::string, double> target;
  std::map<std::string, double> achieved;
  std::map<std::string, double> residual;  // achieved - target
  double max_abs_residual = 0.0;
  bool within_tolerance = false;  // every |residual| <= tolerance
};

/// Least-squares fit of (K, delta) to target average gate fidelities. The fit
/// runs along the K:delta direction of `templ` (1:1 when both are zero); to
/// first order every gate's infidelity depends on K + 2 delta only, so the
/// ratio is not identifiable from fidelities. Infeasible targets return the
/// best fit and its residuals.
CalibrationResult calibrate_rates(const std::map<std::string, double>& targets,
                                  const NoiseModel& templ, double tolerance = 1e-3);

}  // namespace qcaw
