#include <algorithm>
#include <array>
#include <bit>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "qcawalk/errors.hpp"
#include "qcawalk/noise.hpp"
#include "qcawalk/rng.hpp"

namespace qcaw {

namespace {

using Eigen::MatrixXcd;

// Trajectories are reduced in fixed blocks, in block order, so the average does
// not depend on the worker count.
constexpr std::uint64_t kBlockSize = 16;
constexpr int kBisectIters = 60;

// No-jump propagation of one gate or idle interval on 1-2 qubits.
struct Interval {
  int dim = 2;
  double duration = 0.0;
  MatrixXcd heff;  // H - i/2 sum L^dag L
  MatrixXcd drift;  // exp(-i heff duration)
  MatrixXcd drift_inv;
  std::vector<MatrixXcd> jumps;
  std::vector<MatrixXcd> jump_norms;  // L^dag L
  MatrixXcd unitary;  // used when the interval is noiseless
  bool noisy = false;
};

Interval make_interval(const MatrixXcd& generator, const MatrixXcd& unitary, double duration,
                       const NoiseModel& noise) {
  Interval iv;
  iv.dim = static_cast<int>(unitary.rows());
  iv.duration = duration;
  iv.unitary = unitary;
  iv.noisy = duration > 0.0 && !noise.is_noiseless();
  if (!iv.noisy) return iv;
  const int m = iv.dim == 2 ? 1 : 2;
  iv.heff = generator;
  for (int q = 0; q < m; ++q) {
    if (noise.relaxation_rate > 0) {
      iv.jumps.push_back(std::sqrt(noise.relaxation_rate) * lowering_operator(q, m));
    }
    if (noise.dephasing_rate > 0) {
      iv.jumps.push_back(std::sqrt(noise.dephasing_rate) * dephasing_operator(q, m));
    }
  }
  const Complex i{0.0, 1.0};
  for (const auto& l : iv.jumps) {
    iv.jump_norms.push_back(l.adjoint() * l);
    iv.heff -= 0.5 * i * iv.jump_norms.back();
  }
  iv.drift = (-i * iv.heff * duration).exp();
  iv.drift_inv = (i * iv.heff * duration).exp();
  return iv;
}

struct Targets {
  std::array<std::size_t, 4> off{};
  std::array<int, 2> sorted{};
  std::array<int, 2> q{};  // as given
  int m = 1;
};

Targets make_targets(const int* qs, int m) {
  Targets t;
  t.m = m;
  t.q = {qs[0], m == 2 ? qs[1] : qs[0]};
  if (m == 1) {
    t.sorted = {qs[0], 0};
    t.off = {0, std::size_t{1} << qs[0], 0, 0};
  } else {
    const std::size_t a = std::size_t{1} << qs[0];
    const std::size_t b = std::size_t{1} << qs[1];
    t.sorted = {std::min(qs[0], qs[1]), std::max(qs[0], qs[1])};
    t.off = {0, b, a, a | b};  // local index 2*bit(qa) + bit(qb)
  }
  return t;
}

inline std::size_t base_of(std::size_t k, const Targets& t) {
  for (int s = 0; s < t.m; ++s) {
    const int b = t.sorted[static_cast<std::size_t>(s)];
    const std::size_t low = k & ((std::size_t{1} << b) - 1);
    k = ((k >> b) << (b + 1)) | low;
  }
  return k;
}

// psi <- (A (x) I) psi; returns the squared norm afterwards.
template <int D>
double apply_local(std::vector<Complex>& psi, const MatrixXcd& a, const Targets& t) {
  const Eigen::Matrix<Complex, D, D> op = a;
  const std::size_t nb = psi.size() >> t.m;
  double norm = 0.0;
  Eigen::Matrix<Complex, D, 1> v;
  for (std::size_t k = 0; k < nb; ++k) {
    const std::size_t base = base_of(k, t);
    for (int i = 0; i < D; ++i) v(i) = psi[base + t.off[static_cast<std::size_t>(i)]];
    const Eigen::Matrix<Complex, D, 1> w = op * v;
    for (int i = 0; i < D; ++i) {
      psi[base + t.off[static_cast<std::size_t>(i)]] = w(i);
      norm += std::norm(w(i));
    }
  }
  return norm;
}

double apply_op(std::vector<Complex>& psi, const MatrixXcd& a, const Targets& t) {
  return t.m == 1 ? apply_local<2>(psi, a, t) : apply_local<4>(psi, a, t);
}

// G_kl = sum_rest conj(psi_k) psi_l
MatrixXcd gram(const std::vector<Complex>& psi, const Targets& t) {
  const int d = 1 << t.m;
  MatrixXcd g = MatrixXcd::Zero(d, d);
  const std::size_t nb = psi.size() >> t.m;
  for (std::size_t k = 0; k < nb; ++k) {
    const std::size_t base = base_of(k, t);
    for (int r = 0; r < d; ++r) {
      const Complex cr = std::conj(psi[base + t.off[static_cast<std::size_t>(r)]]);
      for (int c = 0; c < d; ++c) g(r, c) += cr * psi[base + t.off[static_cast<std::size_t>(c)]];
    }
  }
  return g;
}

// || (B (x) I) psi ||^2 = sum_kl (B^dag B)_kl G_kl
double local_norm(const MatrixXcd& b, const MatrixXcd& g) {
  return (b.adjoint() * b).cwiseProduct(g).sum().real();
}

// Whole register.
struct FullReg {
  std::vector<Complex> psi;

  double apply(const MatrixXcd& a, const Targets& t) { return apply_op(psi, a, t); }
  MatrixXcd local_gram(const Targets& t) const { return gram(psi, t); }
};

// Register restricted to at most one excitation: a[0] is the vacuum, a[1 + q]
// the state with only qubit q excited. Valid while every operator applied is
// weight non-increasing (checked by the caller).
struct SectorReg {
  std::vector<Complex> a;

  // Local slots reachable from the vacuum of the other qubits.
  static std::array<int, 4> slots(const Targets& t) {
    if (t.m == 1) return {0, 1 + t.q[0], -1, -1};
    return {0, 1 + t.q[1], 1 + t.q[0], -1};
  }

  double apply(const MatrixXcd& m, const Targets& t) {
    const int d = 1 << t.m;
    const auto sl = slots(t);
    std::array<Complex, 4> u{};
    for (int i = 0; i < d; ++i) {
      if (sl[static_cast<std::size_t>(i)] >= 0) u[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(sl[static_cast<std::size_t>(i)])];
    }
    const Complex c00 = m(0, 0);
    for (std::size_t j = 1; j < a.size(); ++j) a[j] *= c00;
    for (int r = 0; r < d; ++r) {
      const int dst = sl[static_cast<std::size_t>(r)];
      if (dst < 0) continue;
      Complex w{};
      for (int c = 0; c < d; ++c) w += m(r, c) * u[static_cast<std::size_t>(c)];
      a[static_cast<std::size_t>(dst)] = w;
    }
    double norm = 0.0;
    for (const auto& x : a) norm += std::norm(x);
    return norm;
  }

  MatrixXcd local_gram(const Targets& t) const {
    const int d = 1 << t.m;
    const auto sl = slots(t);
    std::array<Complex, 4> u{};
    double rest = 0.0;
    for (std::size_t j = 1; j < a.size(); ++j) rest += std::norm(a[j]);
    for (int i = 0; i < d; ++i) {
      const int src = sl[static_cast<std::size_t>(i)];
      if (src < 0) continue;
      u[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(src)];
      if (src > 0) rest -= std::norm(u[static_cast<std::size_t>(i)]);
    }
    MatrixXcd g(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) g(r, c) = std::conj(u[static_cast<std::size_t>(r)]) * u[static_cast<std::size_t>(c)];
    }
    g(0, 0) += std::max(0.0, rest);
    return g;
  }
};

bool weight_non_increasing(const MatrixXcd& a) {
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (std::popcount(static_cast<unsigned>(r)) > std::popcount(static_cast<unsigned>(c)) && a(r, c) != Complex{}) {
        return false;
      }
    }
  }
  return true;
}

std::vector<const MatrixXcd*> interval_ops(const Interval& iv) {
  if (!iv.noisy) return {&iv.unitary};
  std::vector<const MatrixXcd*> ops{&iv.heff, &iv.drift, &iv.drift_inv};
  for (const auto& l : iv.jumps) ops.push_back(&l);
  return ops;
}

bool fits_sector(const Interval& iv) {
  const auto ops = interval_ops(iv);
  return std::all_of(ops.begin(), ops.end(), [](const MatrixXcd* a) { return weight_non_increasing(*a); });
}

// A raising operator still keeps the register in the sector when nothing
// outside its targets can be excited and it never reaches |11>.
bool reaches_double(const Interval& iv) {
  if (iv.dim != 4) return false;
  for (const MatrixXcd* a : interval_ops(iv)) {
    if ((*a)(3, 0) != Complex{} || (*a)(3, 1) != Complex{} || (*a)(3, 2) != Complex{}) return true;
  }
  return false;
}

class Walker {
 public:
  explicit Walker(Rng rng) : rng_(std::move(rng)) { draw(); }

  template <class Reg>
  void run_gate(Reg& reg, const GateSpec& gate, const Interval& iv) {
    const Targets t = make_targets(gate.targets.data(), gate.arity());
    run(reg, iv, t);
  }

  template <class Reg>
  void run_idle(Reg& reg, int q, const Interval& iv) {
    const Targets t = make_targets(&q, 1);
    run(reg, iv, t);
  }

  std::uint64_t jumps() const noexcept { return jumps_; }

 private:
  void draw() { threshold_ = uniform_(rng_); }

  template <class Reg>
  void run(Reg& reg, const Interval& iv, const Targets& t) {
    if (!iv.noisy) {
      reg.apply(iv.unitary, t);
      return;
    }
    // Fast path: assume no jump in this interval, undo when the norm crosses
    // the waiting threshold.
    if (reg.apply(iv.drift, t) > threshold_) return;
    reg.apply(iv.drift_inv, t);

    const MatrixXcd g = reg.local_gram(t);
    const Complex i{0.0, 1.0};
    MatrixXcd acc = MatrixXcd::Identity(iv.dim, iv.dim);
    double remaining = iv.duration;
    while (true) {
      const MatrixXcd full = (-i * iv.heff * remaining).exp() * acc;
      if (local_norm(full, g) > threshold_) {
        acc = full;
        break;
      }
      double lo = 0.0;
      double hi = remaining;
      for (int it = 0; it < kBisectIters; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (local_norm((-i * iv.heff * mid).exp() * acc, g) > threshold_) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double s = 0.5 * (lo + hi);
      acc = (-i * iv.heff * s).exp() * acc;
      remaining = std::max(0.0, remaining - s);

      std::vector<double> w(iv.jumps.size());
      double wsum = 0.0;
      for (std::size_t k = 0; k < iv.jumps.size(); ++k) {
        w[k] = std::max(0.0, local_norm(iv.jumps[k] * acc, g));
        wsum += w[k];
      }
      if (!(wsum > 0.0)) {
        // Nothing can jump; numerically the threshold was not crossed.
        acc = (-i * iv.heff * remaining).exp() * acc;
        break;
      }
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      const std::size_t k = pick(rng_);
      acc = iv.jumps[k] * acc;
      acc /= std::sqrt(w[k]);
      ++jumps_;
      draw();
    }
    reg.apply(acc, t);
  }

  Rng rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  double threshold_ = 0.0;
  std::uint64_t jumps_ = 0;
};

using IntervalKey = std::tuple<int, double, double>;

class IntervalCache {
 public:
  explicit IntervalCache(const NoiseModel& noise) : noise_(noise) {}

  const Interval& gate(const GateSpec& g) {
    const IntervalKey key{static_cast<int>(g.kind), g.angle, g.duration};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      MatrixXcd gen = g.generator.size() ? g.generator
                                          : MatrixXcd::Zero(1 << g.arity(), 1 << g.arity());
      it = cache_.emplace(key, make_interval(gen, g.unitary(), g.duration, noise_)).first;
    }
    return it->second;
  }

  const Interval& idle(double duration) {
    const IntervalKey key{-1, 0.0, duration};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_
               .emplace(key, make_interval(MatrixXcd::Zero(2, 2), MatrixXcd::Identity(2, 2),
                                           duration, noise_))
               .first;
    }
    return it->second;
  }

 private:
  const NoiseModel& noise_;
  std::map<IntervalKey, Interval> cache_;
};

// Precomputed schedule of one layer: gate intervals then idle intervals.
struct LayerPlan {
  std::vector<std::pair<const GateSpec*, const Interval*>> gates;
  std::vector<std::pair<int, const Interval*>> idles;
};

LayerPlan plan_layer(const Layer& layer, int n, IntervalCache& cache, const NoiseModel& noise) {
  LayerPlan p;
  for (const auto& g : layer.gates) p.gates.emplace_back(&g, &cache.gate(g));
  if (noise.idle_decay && !noise.is_noiseless()) {
    const auto busy = layer.busy_time(n);
    const double total = *std::max_element(busy.begin(), busy.end());
    for (int q = 0; q < n; ++q) {
      const double idle = total - busy[static_cast<std::size_t>(q)];
      if (idle > 1e-12 * total) p.idles.emplace_back(q, &cache.idle(idle));
    }
  }
  return p;
}

struct BlockSums {
  std::vector<std::vector<double>> vertex;  // [record][vertex..., leakage]
  std::vector<std::vector<double>> basis;   // [record][basis index]
  std::uint64_t jumps = 0;
};

}  // namespace

TrajectoryResult trajectory_run(const StateVector& init, std::span<const Layer> prep,
                                const StepOperator& step, const NoiseModel& noise,
                                const TrajectoryRequest& request) {
  noise.validate();
  if (request.steps < 0) throw DomainError("steps must be >= 0");
  if (request.n_traj == 0) throw DomainError("n_traj must be >= 1");
  const int n = init.n_qubits();
  const int vcount = request.vertex_count == 0 ? n : request.vertex_count;
  if (vcount < 1 || vcount > n) throw DomainError("vertex count must be in [1, n_qubits]");
  const double init_norm = init.norm_squared();
  if (!(init_norm > 0.0)) throw DomainError("initial state has zero norm");

  IntervalCache cache(noise);
  std::vector<LayerPlan> prep_plan;
  for (const auto& l : prep) prep_plan.push_back(plan_layer(l, n, cache, noise));
  std::vector<LayerPlan> step_plan;
  for (const auto& l : step.layers) step_plan.push_back(plan_layer(l, n, cache, noise));

  const std::size_t records = static_cast<std::size_t>(request.steps) + 1;
  const std::size_t dim = init.size();

  auto new_sums = [&] {
    BlockSums s;
    s.vertex.assign(records, std::vector<double>(static_cast<std::size_t>(vcount) + 1, 0.0));
    if (request.record_bitstrings) s.basis.assign(records, std::vector<double>(dim, 0.0));
    return s;
  };

  // amp(i) is the amplitude of one-hot vertex i, or of basis index i for bitstrings
  auto record = [&](BlockSums& s, std::size_t r, const std::vector<Complex>& amps, bool sector) {
    double total = 0.0;
    for (const auto& a : amps) total += std::norm(a);
    const double inv = 1.0 / total;
    double in_sector = 0.0;
    auto& vs = s.vertex[r];
    for (int v = 0; v < vcount; ++v) {
      const std::size_t i = sector ? static_cast<std::size_t>(v) + 1 : std::size_t{1} << v;
      const double p = std::norm(amps[i]) * inv;
      vs[static_cast<std::size_t>(v)] += p;
      in_sector += p;
    }
    vs.back() += std::max(0.0, 1.0 - in_sector);
    if (request.record_bitstrings) {
      auto& bs = s.basis[r];
      if (sector) {
        bs[0] += std::norm(amps[0]) * inv;
        for (int q = 0; q < n; ++q) {
          bs[std::size_t{1} << q] += std::norm(amps[static_cast<std::size_t>(q) + 1]) * inv;
        }
      } else {
        for (std::size_t i = 0; i < dim; ++i) bs[i] += std::norm(amps[i]) * inv;
      }
    }
  };

  auto run_layer = [](Walker& w, auto& reg, const LayerPlan& lp) {
    for (const auto& [g, iv] : lp.gates) w.run_gate(reg, *g, *iv);
    for (const auto& [q, iv] : lp.idles) w.run_idle(reg, q, *iv);
  };

  std::vector<Complex> normalized(init.amplitudes().begin(), init.amplitudes().end());
  for (auto& a : normalized) a /= std::sqrt(init_norm);

  // Walks never raise the excitation number, so trajectories that start with
  // at most one excitation only need n + 1 amplitudes. Prep gates may excite
  // a qubit as long as no other qubit can already be excited.
  auto sector_ok = [&] {
    if (!request.allow_sector) return false;
    std::vector<bool> maybe(static_cast<std::size_t>(n), false);
    for (std::size_t i = 0; i < normalized.size(); ++i) {
      if (normalized[i] == Complex{}) continue;
      if (std::popcount(i) > 1) return false;
      if (i != 0) maybe[static_cast<std::size_t>(std::countr_zero(i))] = true;
    }
    for (const auto& lp : prep_plan) {
      for (const auto& [g, iv] : lp.gates) {
        auto on_target = [&](int q) { return std::find(g->targets.begin(), g->targets.end(), q) != g->targets.end(); };
        bool touches = false;
        for (int q = 0; q < n; ++q) {
          if (!maybe[static_cast<std::size_t>(q)]) continue;
          if (on_target(q)) {
            touches = true;
          } else if (!fits_sector(*iv)) {
            return false;
          }
        }
        if (reaches_double(*iv)) return false;
        if (touches || !fits_sector(*iv)) {
          for (int q : g->targets) maybe[static_cast<std::size_t>(q)] = true;
        }
      }
      for (const auto& [q, iv] : lp.idles) {
        if (!fits_sector(*iv)) return false;
      }
    }
    for (const auto& lp : step_plan) {
      for (const auto& [g, iv] : lp.gates) {
        if (!fits_sector(*iv)) return false;
      }
      for (const auto& [q, iv] : lp.idles) {
        if (!fits_sector(*iv)) return false;
      }
    }
    return true;
  };
  const bool use_sector = sector_ok();
  SectorReg init_sector;
  if (use_sector) {
    init_sector.a.assign(static_cast<std::size_t>(n) + 1, Complex{});
    init_sector.a[0] = normalized[0];
    for (int q = 0; q < n; ++q) init_sector.a[static_cast<std::size_t>(q) + 1] = normalized[std::size_t{1} << q];
  }

  auto run_block = [&](std::uint64_t block) {
    BlockSums s = new_sums();
    const std::uint64_t first = block * kBlockSize;
    const std::uint64_t last = std::min(request.n_traj, first + kBlockSize);
    for (std::uint64_t k = first; k < last; ++k) {
      Walker w(make_rng(request.seed, StreamTag::trajectory, k));
      if (use_sector) {
        SectorReg sreg = init_sector;
        for (const auto& lp : prep_plan) run_layer(w, sreg, lp);
        record(s, 0, sreg.a, true);
        for (int t = 1; t <= request.steps; ++t) {
          for (const auto& lp : step_plan) run_layer(w, sreg, lp);
          record(s, static_cast<std::size_t>(t), sreg.a, true);
        }
      } else {
        FullReg full{normalized};
        for (const auto& lp : prep_plan) run_layer(w, full, lp);
        record(s, 0, full.psi, false);
        for (int t = 1; t <= request.steps; ++t) {
          for (const auto& lp : step_plan) run_layer(w, full, lp);
          record(s, static_cast<std::size_t>(t), full.psi, false);
        }
      }
      s.jumps += w.jumps();
    }
    return s;
  };

  const std::uint64_t n_blocks = (request.n_traj + kBlockSize - 1) / kBlockSize;
  BlockSums total = new_sums();
  auto commit = [&](const BlockSums& s) {
    for (std::size_t r = 0; r < records; ++r) {
      for (std::size_t v = 0; v < s.vertex[r].size(); ++v) total.vertex[r][v] += s.vertex[r][v];
      if (request.record_bitstrings) {
        for (std::size_t i = 0; i < dim; ++i) total.basis[r][i] += s.basis[r][i];
      }
    }
    total.jumps += s.jumps;
  };

  const int workers = std::max(1, std::min<int>(request.workers, static_cast<int>(n_blocks)));
  if (workers == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) commit(run_block(b));
  } else {
    // Blocks finish out of order; commit strictly in block order.
    std::atomic<std::uint64_t> next{0};
    std::mutex mu;
    std::condition_variable cv;
    std::uint64_t committed = 0;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::uint64_t b = next.fetch_add(1);
          if (b >= n_blocks) return;
          BlockSums s;
          try {
            s = run_block(b);
          } catch (...) {
            std::lock_guard lk(mu);
            if (!error) error = std::current_exception();
          }
          std::unique_lock lk(mu);
          cv.wait(lk, [&] { return committed == b; });
          if (!error) commit(s);
          ++committed;
          cv.notify_all();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  TrajectoryResult out;
  const double inv = 1.0 / static_cast<double>(request.n_traj);
  for (std::size_t r = 0; r < records; ++r) {
    std::map<Outcome, double> probs;
    double sum = 0.0;
    for (int v = 0; v < vcount; ++v) {
      const double p = total.vertex[r][static_cast<std::size_t>(v)] * inv;
      probs[Outcome::vertex(static_cast<std::uint64_t>(v))] = p;
      sum += p;
    }
    probs[Outcome::leakage()] = std::max(0.0, 1.0 - sum);
    out.per_step.push_back(Distribution::exact(std::move(probs)));
    if (request.record_bitstrings) {
      auto& bp = total.basis[r];
      for (auto& p : bp) p *= inv;
      out.basis_probs.push_back(std::move(bp));
    }
  }
  out.total_jumps = total.jumps;
  out.sector_trajectories = use_sector ? request.n_traj : 0;
  return out;
}

Distribution trajectory_run(const StateVector& init, const StepOperator& step,
                            const NoiseModel& noise, std::uint64_t n_traj, std::uint64_t seed) {
  TrajectoryRequest req;
  req.steps = 1;
  req.n_traj = n_traj;
  req.seed = seed;
  return trajectory_run(init, {}, step, noise, req).per_step.at(1);
}

}  // namespace qcaw
