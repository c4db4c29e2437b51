#include "qcawalk/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "qcawalk/errors.hpp"
#include "qcawalk/rng.hpp"

namespace qcaw {

namespace {

constexpr int kMaxQubits = 30;
constexpr double kProbTol = 1e-9;
constexpr double kSamplingFloor = 1e-15;

void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw DomainError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                      std::to_string(n));
  }
}

}  // namespace

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  check_qubit_count(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  check_qubit_count(n_qubits);
  if (amps_.size() != (std::size_t{1} << n_qubits)) {
    throw DomainError("amplitude array length must be 2^n_qubits");
  }
}

StateVector StateVector::basis(int n_qubits, BasisIndex index) {
  StateVector psi(n_qubits);
  if (index >= psi.size()) throw DomainError("basis index out of range");
  psi.amps_[0] = 0.0;
  psi.amps_[index] = 1.0;
  return psi;
}

double StateVector::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void StateVector::normalize() {
  const double n2 = norm_squared();
  if (n2 <= 0.0) throw DomainError("cannot normalize the zero vector");
  scale(1.0 / std::sqrt(n2));
}

void StateVector::scale(Complex factor) noexcept {
  for (auto& a : amps_) a *= factor;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  std::transform(amps_.begin(), amps_.end(), p.begin(), [](Complex a) { return std::norm(a); });
  return p;
}

// -------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits) {
  check_qubit_count(n_qubits);
  const auto d = Eigen::Index{1} << n_qubits;
  rho_ = Eigen::MatrixXcd::Zero(d, d);
  rho_(0, 0) = 1.0;
}

DensityMatrix::DensityMatrix(int n_qubits, Eigen::MatrixXcd entries)
    : n_qubits_(n_qubits), rho_(std::move(entries)) {
  check_qubit_count(n_qubits);
  const auto d = Eigen::Index{1} << n_qubits;
  if (rho_.rows() != d || rho_.cols() != d) {
    throw DomainError("density matrix must be 2^n x 2^n");
  }
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(),
                                       static_cast<Eigen::Index>(psi.size()));
  return DensityMatrix(psi.n_qubits(), v * v.adjoint());
}

double DensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> DensityMatrix::diagonal_probabilities() const {
  std::vector<double> p(dim());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::max(0.0, rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
  }
  return p;
}

// ------------------------------------------------------------------- Outcome

std::string Outcome::label(int width) const {
  switch (kind) {
    case Kind::vertex:
      return std::to_string(value);
    case Kind::leakage:
      return "leakage";
    case Kind::bitstring: {
      std::string s(static_cast<std::size_t>(std::max(width, 1)), '0');
      for (int k = 0; k < width; ++k) {
        if ((value >> k) & 1U) s[static_cast<std::size_t>(width - 1 - k)] = '1';
      }
      return s;
    }
  }
  return {};
}

Outcome Outcome::parse(const std::string& label, bool bitstrings) {
  if (label == "leakage") return leakage();
  if (label.empty()) throw DomainError("empty outcome label");
  if (bitstrings) {
    BasisIndex v = 0;
    for (const char c : label) {
      if (c != '0' && c != '1') throw DomainError("bad bitstring label: " + label);
      v = (v << 1) | static_cast<BasisIndex>(c - '0');
    }
    return bitstring(v);
  }
  std::size_t pos = 0;
  const auto v = std::stoull(label, &pos);
  if (pos != label.size()) throw DomainError("bad outcome label: " + label);
  return vertex(v);
}

// -------------------------------------------------------------- Distribution

Distribution Distribution::exact(std::map<Outcome, double> probs, int bit_width) {
  double sum = 0.0;
  for (auto& [o, p] : probs) {
    if (!std::isfinite(p) || p < -kProbTol || p > 1.0 + kProbTol) {
      throw DomainError("probability out of [0,1] for outcome " + o.label(bit_width));
    }
    p = std::clamp(p, 0.0, 1.0);
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    throw DomainError("probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  Distribution d;
  d.probs_ = std::move(probs);
  d.bit_width_ = bit_width;
  return d;
}

Distribution Distribution::empirical(std::map<Outcome, std::uint64_t> counts, int bit_width) {
  std::uint64_t shots = 0;
  for (const auto& [o, c] : counts) shots += c;
  if (shots == 0) throw DomainError("empirical distribution needs at least one shot");
  Distribution d;
  for (const auto& [o, c] : counts) {
    if (c > 0) d.probs_[o] = static_cast<double>(c) / static_cast<double>(shots);
  }
  std::erase_if(counts, [](const auto& kv) { return kv.second == 0; });
  d.counts_ = std::move(counts);
  d.shots_ = shots;
  d.bit_width_ = bit_width;
  return d;
}

double Distribution::prob(const Outcome& o) const {
  const auto it = probs_.find(o);
  return it == probs_.end() ? 0.0 : it->second;
}

double Distribution::total() const {
  double s = 0.0;
  for (const auto& [o, p] : probs_) s += p;
  return s;
}

// --------------------------------------------------------- sector utilities

BasisIndex onehot_index(int vertex, int n_qubits) {
  if (n_qubits < 1 || n_qubits > 63) throw DomainError("n_qubits out of range");
  if (vertex < 0 || vertex >= n_qubits) {
    throw DomainError("vertex " + std::to_string(vertex) + " outside [0, " +
                      std::to_string(n_qubits) + ")");
  }
  return BasisIndex{1} << vertex;
}

std::optional<int> decode_onehot(BasisIndex index, int n_qubits) {
  if (std::popcount(index) != 1) return std::nullopt;
  const int v = std::countr_zero(index);
  if (v >= n_qubits) return std::nullopt;
  return v;
}

SectorState sector_project(const StateVector& psi, int vertex_count) {
  if (vertex_count < 1 || vertex_count > psi.n_qubits()) {
    throw DomainError("vertex count must be in [1, n_qubits]");
  }
  SectorState s;
  s.amplitudes.resize(static_cast<std::size_t>(vertex_count));
  double in_sector = 0.0;
  for (int v = 0; v < vertex_count; ++v) {
    const Complex a = psi[onehot_index(v, psi.n_qubits())];
    s.amplitudes[static_cast<std::size_t>(v)] = a;
    in_sector += std::norm(a);
  }
  s.leakage_norm = std::max(0.0, psi.norm_squared() - in_sector);
  return s;
}

Distribution vertex_distribution(std::span<const double> basis_probs, int n_qubits,
                                 int vertex_count) {
  if (basis_probs.size() != (std::size_t{1} << n_qubits)) {
    throw DomainError("probability vector length must be 2^n_qubits");
  }
  std::map<Outcome, double> probs;
  double total = 0.0;
  for (const double p : basis_probs) total += p;
  double in_sector = 0.0;
  for (int v = 0; v < vertex_count; ++v) {
    const double p = basis_probs[onehot_index(v, n_qubits)];
    probs[Outcome::vertex(static_cast<std::uint64_t>(v))] = p;
    in_sector += p;
  }
  probs[Outcome::leakage()] = std::max(0.0, total - in_sector);
  return Distribution::exact(std::move(probs));
}

Distribution bitstring_distribution(std::span<const double> basis_probs, int n_qubits) {
  if (basis_probs.size() != (std::size_t{1} << n_qubits)) {
    throw DomainError("probability vector length must be 2^n_qubits");
  }
  std::map<Outcome, double> probs;
  for (std::size_t i = 0; i < basis_probs.size(); ++i) {
    if (basis_probs[i] > 0.0) probs[Outcome::bitstring(i)] = basis_probs[i];
  }
  return Distribution::exact(std::move(probs), n_qubits);
}

Distribution sample_counts(const Distribution& dist, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw DomainError("shots must be >= 1");

  std::vector<std::pair<Outcome, double>> entries;
  double mass = 0.0;
  for (const auto& [o, p] : dist.probabilities()) {
    const double q = p < kSamplingFloor ? 0.0 : p;
    if (q > 0.0) {
      entries.emplace_back(o, q);
      mass += q;
    }
  }
  if (entries.empty()) throw DomainError("cannot sample from an all-zero distribution");

  // Multinomial as a chain of conditional binomials.
  Rng rng(seed);
  std::map<Outcome, std::uint64_t> counts;
  std::uint64_t remaining = shots;
  double remaining_mass = mass;
  for (std::size_t i = 0; i < entries.size() && remaining > 0; ++i) {
    const auto& [o, p] = entries[i];
    std::uint64_t c = remaining;
    if (i + 1 < entries.size()) {
      const double q = std::clamp(p / remaining_mass, 0.0, 1.0);
      std::binomial_distribution<std::uint64_t> draw(remaining, q);
      c = draw(rng);
    }
    if (c > 0) counts[o] = c;
    remaining -= c;
    remaining_mass -= p;
    if (remaining_mass <= 0.0) remaining_mass = 0.0;
  }
  return Distribution::empirical(std::move(counts), dist.bit_width());
}

}  // namespace qcaw
