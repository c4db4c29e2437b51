#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcaw {

using Complex = std::complex<double>;
using BasisIndex = std::uint64_t;

// Bit convention: qubit k is bit k of the basis index (little-endian). Lattice
// vertex v lives on qubit v; torus vertex (i, j) has id i + N*j.

/// Pure state of an n-qubit register, 2^n dense amplitudes.
class StateVector {
 public:
  /// |0...0>
  explicit StateVector(int n_qubits);
  StateVector(int n_qubits, std::vector<Complex> amplitudes);

  static StateVector basis(int n_qubits, BasisIndex index);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return amps_.size(); }

  std::span<Complex> amplitudes() noexcept { return amps_; }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  Complex& operator[](BasisIndex i) { return amps_[i]; }
  const Complex& operator[](BasisIndex i) const { return amps_[i]; }

  double norm_squared() const noexcept;
  void normalize();
  void scale(Complex factor) noexcept;
  std::vector<double> probabilities() const;

 private:
  int n_qubits_;
  std::vector<Complex> amps_;
};

/// Mixed state, dense 2^n x 2^n.
class DensityMatrix {
 public:
  /// |0...0><0...0|
  explicit DensityMatrix(int n_qubits);
  DensityMatrix(int n_qubits, Eigen::MatrixXcd entries);

  static DensityMatrix from_state(const StateVector& psi);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
  Eigen::MatrixXcd& matrix() noexcept { return rho_; }

  Complex trace() const { return rho_.trace(); }
  /// max |rho - rho^dagger| elementwise
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// Real diagonal, clamped from below at 0.
  std::vector<double> diagonal_probabilities() const;

 private:
  int n_qubits_;
  Eigen::MatrixXcd rho_;
};

/// Amplitudes of a state restricted to the one-particle sector.
struct SectorState {
  std::vector<Complex> amplitudes;  // index = vertex
  double leakage_norm = 0.0;        // mass outside the sector (including vacuum)

  int vertex_count() const noexcept { return static_cast<int>(amplitudes.size()); }
};

/// Label of a measured outcome: a lattice vertex, the collapsed out-of-sector
/// "leakage" bucket, or a raw register bitstring.
struct Outcome {
  enum class Kind : std::uint8_t { vertex = 0, leakage = 1, bitstring = 2 };

  Kind kind = Kind::vertex;
  std::uint64_t value = 0;

  static Outcome vertex(std::uint64_t v) { return {Kind::vertex, v}; }
  static Outcome leakage() { return {Kind::leakage, 0}; }
  static Outcome bitstring(BasisIndex b) { return {Kind::bitstring, b}; }

  /// "3", "leakage", or a width-digit bitstring with qubit width-1 leftmost.
  std::string label(int width = 0) const;
  /// Inverse of label(); decimal labels decode as vertices unless `bitstrings`.
  static Outcome parse(const std::string& label, bool bitstrings = false);

  auto operator<=>(const Outcome&) const = default;
};

/// Probability distribution over outcome labels; exact, or empirical with counts.
class Distribution {
 public:
  Distribution() = default;

  /// Validates entries in [0,1] (within 1e-9) and total within 1e-9 of 1.
  static Distribution exact(std::map<Outcome, double> probs, int bit_width = 0);
  static Distribution empirical(std::map<Outcome, std::uint64_t> counts, int bit_width = 0);

  double prob(const Outcome& o) const;
  double total() const;
  const std::map<Outcome, double>& probabilities() const noexcept { return probs_; }

  bool is_empirical() const noexcept { return shots_.has_value(); }
  std::optional<std::uint64_t> shots() const noexcept { return shots_; }
  const std::map<Outcome, std::uint64_t>& counts() const noexcept { return counts_; }

  int bit_width() const noexcept { return bit_width_; }

 private:
  std::map<Outcome, double> probs_;
  std::map<Outcome, std::uint64_t> counts_;
  std::optional<std::uint64_t> shots_;
  int bit_width_ = 0;
};

/// Basis index with a single 1 at the qubit of `vertex`.
BasisIndex onehot_index(int vertex, int n_qubits);

/// Vertex encoded by a one-hot index, or nullopt when popcount != 1.
std::optional<int> decode_onehot(BasisIndex index, int n_qubits);

SectorState sector_project(const StateVector& psi, int vertex_count);

/// Collapses basis-state probabilities onto vertex labels plus a leakage label.
Distribution vertex_distribution(std::span<const double> basis_probs, int n_qubits,
                                 int vertex_count);

/// Keeps raw bitstrings; zero-probability strings are omitted.
Distribution bitstring_distribution(std::span<const double> basis_probs, int n_qubits);

/// Multinomial draw of `shots` outcomes. Deterministic for a fixed seed.
Distribution sample_counts(const Distribution& dist, std::uint64_t shots, std::uint64_t seed);

}  // namespace qcaw
