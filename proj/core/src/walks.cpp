#include "qcawalk/walks.hpp"

#include <bit>
#include <chrono>
#include <cmath>

#include "qcawalk/errors.hpp"
#include "qcawalk/rng.hpp"

namespace qcaw {

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::single:
      return "single";
    case InitKind::symmetric:
      return "symmetric";
    case InitKind::search_uniform:
      return "search_uniform";
  }
  return "?";
}

std::string to_string(InitializerMode m) { return m == InitializerMode::literal ? "literal" : "exact"; }

std::string to_string(BackendKind b) {
  switch (b) {
    case BackendKind::statevector:
      return "statevector";
    case BackendKind::density:
      return "density";
    case BackendKind::trajectories:
      return "trajectories";
  }
  return "?";
}

void WalkConfig::validate() const {
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (variant == Variant::search) {
    if (!marked) throw ConfigError("search needs a marked vertex");
    if (!lattice.contains(*marked)) throw ConfigError("marked vertex out of range");
  } else if (marked) {
    throw ConfigError("marked vertex is only meaningful for search");
  }
  if (init != InitKind::search_uniform && !lattice.contains(init_vertex)) {
    throw ConfigError("init vertex out of range");
  }
  if (init == InitKind::search_uniform && init_mode == InitializerMode::literal &&
      !std::has_single_bit(static_cast<unsigned>(lattice.vertex_count()))) {
    throw ConfigError("literal search initializer needs a power-of-two vertex count");
  }
  if (!std::isfinite(walk_theta)) throw ConfigError("walk angle must be finite");
  if (backend.kind == BackendKind::trajectories && backend.n_traj == 0) {
    throw ConfigError("n_traj must be >= 1");
  }
  if (backend.density_cap < 1) throw ConfigError("density cap must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  noise.validate();
}

Circuit qw_init_circuit(const Lattice& lattice, int site, bool symmetric, const GateTiming& timing) {
  if (!lattice.contains(site)) throw DomainError("init site out of range");
  Circuit c;
  // RX(pi) rather than RX(pi/2): a full flip leaves no vacuum component.
  c.push_back({"excite", {make_rotation(PauliAxis::x, site, std::numbers::pi, timing)}});
  if (symmetric) {
    // the RZ evens out the i picked up on the partner site
    const int partner = lattice.next_along_x(site);
    c.push_back({"split",
                 {make_xy(site, partner, std::numbers::pi / 4, timing),
                  make_rotation(PauliAxis::z, partner, -std::numbers::pi / 2, timing)}});
  }
  return c;
}

StateVector qw_init(const Lattice& lattice, int site, bool symmetric) {
  StateVector psi(lattice.vertex_count());
  apply_circuit(psi, qw_init_circuit(lattice, site, symmetric));
  return psi;
}

Circuit search_initializer_circuit(const Lattice& lattice, const GateTiming& timing) {
  const int n = lattice.vertex_count();
  if (!std::has_single_bit(static_cast<unsigned>(n))) {
    throw DomainError("literal search initializer needs a power-of-two vertex count, got " +
                      std::to_string(n));
  }
  Circuit c;
  c.push_back({"excite", {make_rotation(PauliAxis::x, 0, std::numbers::pi, timing)}});
  int round = 0;
  for (int s = n / 2; s >= 1; s /= 2, ++round) {
    Layer layer{"split" + std::to_string(round), {}};
    for (int q = 0; q < n; q += 2 * s) {
      layer.gates.push_back(make_xy(q, q + s, std::numbers::pi / 4, timing));
      layer.gates.push_back(make_rotation(PauliAxis::z, q + s, -std::numbers::pi / 2, timing));
    }
    c.push_back(std::move(layer));
  }
  return c;
}

StateVector search_initializer(const Lattice& lattice, InitializerMode mode) {
  const int n = lattice.vertex_count();
  if (mode == InitializerMode::literal) {
    StateVector psi(n);
    apply_circuit(psi, search_initializer_circuit(lattice));
    return psi;
  }
  std::vector<Complex> amps(std::size_t{1} << n, Complex{});
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int v = 0; v < n; ++v) amps[onehot_index(v, n)] = a;
  return StateVector(n, std::move(amps));
}

Eigen::MatrixXcd sector_oracle(const Lattice& lattice, const AngleSchedule& schedule,
                               Variant variant) {
  const int v = lattice.vertex_count();
  const Complex i{0.0, 1.0};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(v, v);
  for (const auto& tess : build_tessellations(lattice)) {
    Eigen::MatrixXcd layer = Eigen::MatrixXcd::Identity(v, v);
    Eigen::VectorXcd phase = Eigen::VectorXcd::Ones(v);
    for (const auto& pair : tess.pairs) {
      const auto [a, b] = pair;
      const double th = schedule.angle_for(pair);
      layer(a, a) = std::cos(th);
      layer(b, b) = std::cos(th);
      layer(a, b) = i * std::sin(th);
      layer(b, a) = i * std::sin(th);
      if (variant == Variant::search && !schedule.touches_marked(pair)) {
        // RZ(-pi/2) on both qubits: +i on every one-hot state outside the pair.
        for (int s = 0; s < v; ++s) {
          if (s != a && s != b) phase(s) *= i;
        }
      }
    }
    m = phase.asDiagonal() * layer * m;
  }
  return m;
}

StepOperator step_operator_for(const WalkConfig& config) {
  const AngleSchedule schedule = config.variant == Variant::search
                                     ? AngleSchedule::search(config.marked.value())
                                     : AngleSchedule::walk(config.walk_theta);
  return build_step_operator(config.lattice, schedule, config.variant, config.noise.timing());
}

namespace {

// Prep circuit and the state it should start from (|0..0> for circuits).
struct Prep {
  Circuit circuit;
  std::optional<StateVector> direct;
};

Prep make_prep(const WalkConfig& c) {
  const auto timing = c.noise.timing();
  Prep p;
  switch (c.init) {
    case InitKind::single:
      p.circuit = qw_init_circuit(c.lattice, c.init_vertex, false, timing);
      break;
    case InitKind::symmetric:
      p.circuit = qw_init_circuit(c.lattice, c.init_vertex, true, timing);
      break;
    case InitKind::search_uniform:
      if (c.init_mode == InitializerMode::literal) {
        p.circuit = search_initializer_circuit(c.lattice, timing);
      } else {
        p.direct = search_initializer(c.lattice, InitializerMode::exact);
      }
      break;
  }
  return p;
}

int count_two_qubit(const Circuit& c) {
  int n = 0;
  for (const auto& l : c) n += l.two_qubit_gate_count();
  return n;
}

}  // namespace

WalkResult run_walk(const WalkConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = config.lattice.vertex_count();
  const StepOperator step = step_operator_for(config);
  const Prep prep = make_prep(config);

  WalkResult res;
  res.init_two_qubit_gates = count_two_qubit(prep.circuit);
  res.step_two_qubit_gates = step.two_qubit_gate_count();
  {
    StateVector ideal = prep.direct ? *prep.direct : StateVector(n);
    if (!prep.direct) apply_circuit(ideal, prep.circuit);
    res.init_sector_amplitudes = sector_project(ideal, n).amplitudes;
  }

  auto push = [&](Distribution exact, std::span<const double> basis_probs) {
    StepRecord r;
    r.leakage = exact.prob(Outcome::leakage());
    if (config.shots > 0) {
      const auto t = static_cast<std::uint64_t>(res.per_step.size());
      r.empirical = sample_counts(exact, config.shots, derive_seed(config.seed, StreamTag::shots, t));
    }
    r.exact = std::move(exact);
    if (config.record_bitstrings && !basis_probs.empty()) {
      r.bitstrings = bitstring_distribution(basis_probs, n);
    }
    res.per_step.push_back(std::move(r));
  };

  switch (config.backend.kind) {
    case BackendKind::statevector: {
      StateVector psi = prep.direct ? *prep.direct : StateVector(n);
      if (!prep.direct) apply_circuit(psi, prep.circuit);
      for (int t = 0; t <= config.steps; ++t) {
        if (t > 0) apply_step(psi, step);
        const auto p = psi.probabilities();
        push(vertex_distribution(p, n, n), p);
      }
      break;
    }
    case BackendKind::density: {
      if (n > config.backend.density_cap) {
        throw ResourceError("density backend is capped at " +
                            std::to_string(config.backend.density_cap) + " qubits but " +
                            config.lattice.name() + " needs " + std::to_string(n) +
                            "; use backend \"trajectories\"");
      }
      DensityEvolver ev(config.noise, config.backend.density_cap);
      DensityMatrix rho = DensityMatrix::from_state(prep.direct ? *prep.direct : StateVector(n));
      ev.apply_circuit(rho, prep.circuit);
      for (int t = 0; t <= config.steps; ++t) {
        if (t > 0) ev.apply_circuit(rho, step.layers);
        const auto p = rho.diagonal_probabilities();
        push(vertex_distribution(p, n, n), p);
      }
      break;
    }
    case BackendKind::trajectories: {
      TrajectoryRequest req;
      req.steps = config.steps;
      req.n_traj = config.backend.n_traj;
      req.seed = derive_seed(config.seed, StreamTag::trajectory, 0);
      req.vertex_count = n;
      req.record_bitstrings = config.record_bitstrings;
      req.workers = config.workers;
      const StateVector init = prep.direct ? *prep.direct : StateVector(n);
      auto tr = trajectory_run(init, prep.circuit, step, config.noise, req);
      for (int t = 0; t <= config.steps; ++t) {
        const auto k = static_cast<std::size_t>(t);
        const std::span<const double> bp =
            config.record_bitstrings ? std::span<const double>(tr.basis_probs[k])
                                     : std::span<const double>{};
        push(std::move(tr.per_step[k]), bp);
      }
      res.trajectory_jumps = tr.total_jumps;
      break;
    }
  }
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace qcaw
