#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qcawalk/circuit.hpp"
#include "qcawalk/lattice.hpp"
#include "qcawalk/noise.hpp"
#include "qcawalk/state.hpp"

namespace qcaw {

enum class InitKind { single, symmetric, search_uniform };
/// literal: the butterfly circuit. exact: 1/sqrt(N) on every one-hot state.
enum class InitializerMode { literal, exact };
enum class BackendKind { statevector, density, trajectories };

std::string to_string(InitKind k);
std::string to_string(InitializerMode m);
std::string to_string(BackendKind b);

struct Backend {
  BackendKind kind = BackendKind::statevector;
  std::uint64_t n_traj = 1000;
  int density_cap = kDefaultDensityCap;
};

struct WalkConfig {
  Lattice lattice = Lattice::cycle(4);
  Variant variant = Variant::walk;
  int steps = 0;
  InitKind init = InitKind::single;
  int init_vertex = 0;
  InitializerMode init_mode = InitializerMode::exact;
  std::optional<int> marked;  // required iff variant == search
  double walk_theta = std::numbers::pi / 4;
  std::uint64_t shots = 10000;  // 0 disables sampling
  std::uint64_t seed = 0;
  Backend backend;
  NoiseModel noise;  // ignored by the statevector backend
  bool record_bitstrings = false;
  int workers = 1;

  /// Throws ConfigError / DomainError on inconsistent settings.
  void validate() const;
};

struct StepRecord {
  Distribution exact;                     // vertices + leakage
  std::optional<Distribution> empirical;  // sampled from `exact`
  double leakage = 0.0;
  std::optional<Distribution> bitstrings;  // raw register, when requested
};

struct WalkResult {
  std::vector<StepRecord> per_step;  // steps + 1 entries, t = 0 first
  int init_two_qubit_gates = 0;
  int step_two_qubit_gates = 0;
  std::vector<Complex> init_sector_amplitudes;  // ideal t = 0 amplitudes
  std::uint64_t trajectory_jumps = 0;
  double elapsed_seconds = 0.0;
};

/// RX(pi) on `site`; with `symmetric`, then sqrt(iSWAP)(site, next_along_x(site)).
Circuit qw_init_circuit(const Lattice& lattice, int site, bool symmetric,
                        const GateTiming& timing = {});
StateVector qw_init(const Lattice& lattice, int site, bool symmetric);

/// Butterfly: RX(pi) on qubit 0, then for r = 0..log2(N)-1 with stride
/// s = N / 2^(r+1), every occupied q (multiple of 2s) gets sqrt(iSWAP)(q, q+s)
/// followed by RZ(-pi/2) on q+s. N - 1 two-qubit gates. Requires N = 2^k.
Circuit search_initializer_circuit(const Lattice& lattice, const GateTiming& timing = {});
StateVector search_initializer(const Lattice& lattice, InitializerMode mode);

/// V x V one-particle matrix of one step, built without the 2^V register.
Eigen::MatrixXcd sector_oracle(const Lattice& lattice, const AngleSchedule& schedule,
                               Variant variant);

/// Step operator of a config (walk angle or search rule).
StepOperator step_operator_for(const WalkConfig& config);

WalkResult run_walk(const WalkConfig& config);

}  // namespace qcaw
