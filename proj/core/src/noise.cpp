#include "qcawalk/noise.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qcawalk/errors.hpp"

namespace qcaw {

namespace {

using Eigen::MatrixXcd;

// Single-qubit operator `op` on qubit q of an n-qubit register (bit q of the index).
MatrixXcd embed(const Matrix2& op, int q, int n_qubits) {
  if (q < 0 || q >= n_qubits) throw DomainError("qubit out of range");
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  const Eigen::Index bit = Eigen::Index{1} << q;
  MatrixXcd m = MatrixXcd::Zero(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const int b = (col & bit) ? 1 : 0;
    for (int a = 0; a < 2; ++a) {
      const Complex v = op(a, b);
      if (v == Complex{}) continue;
      const Eigen::Index row = a ? (col | bit) : (col & ~bit);
      m(row, col) += v;
    }
  }
  return m;
}

Matrix2 sigma_minus() {
  Matrix2 m = Matrix2::Zero();
  m(0, 1) = 1.0;
  return m;
}

std::vector<MatrixXcd> jump_operators(const NoiseModel& noise, int n_qubits) {
  std::vector<MatrixXcd> ops;
  for (int q = 0; q < n_qubits; ++q) {
    if (noise.relaxation_rate > 0) {
      ops.push_back(std::sqrt(noise.relaxation_rate) * lowering_operator(q, n_qubits));
    }
    if (noise.dephasing_rate > 0) {
      ops.push_back(std::sqrt(noise.dephasing_rate) * dephasing_operator(q, n_qubits));
    }
  }
  return ops;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(relaxation_rate >= 0.0) || !std::isfinite(relaxation_rate)) {
    throw DomainError("relaxation rate K must be finite and >= 0");
  }
  if (!(dephasing_rate >= 0.0) || !std::isfinite(dephasing_rate)) {
    throw DomainError("dephasing rate delta must be finite and >= 0");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("coupling gamma must be > 0");
  if (!(single_qubit_duration > 0.0) || !std::isfinite(single_qubit_duration)) {
    throw DomainError("single-qubit gate duration must be > 0");
  }
}

MatrixXcd lowering_operator(int q, int n_qubits) { return embed(sigma_minus(), q, n_qubits); }

MatrixXcd dephasing_operator(int q, int n_qubits) {
  return embed(pauli(PauliAxis::z), q, n_qubits);
}

MatrixXcd lindblad_rhs(const MatrixXcd& rho, const MatrixXcd& hamiltonian,
                       const NoiseModel& noise) {
  if (rho.rows() != rho.cols()) throw DomainError("rho must be square");
  if (hamiltonian.rows() != rho.rows() || hamiltonian.cols() != rho.cols()) {
    throw DomainError("Hamiltonian and rho dimensions differ");
  }
  const auto d = rho.rows();
  if (d < 2 || (d & (d - 1)) != 0) throw DomainError("rho dimension must be a power of two");
  const int n = static_cast<int>(std::log2(static_cast<double>(d)) + 0.5);

  const Complex i{0.0, 1.0};
  MatrixXcd out = -i * (hamiltonian * rho - rho * hamiltonian);
  for (const auto& a : jump_operators(noise, n)) {
    const MatrixXcd ada = a.adjoint() * a;
    out += a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada);
  }
  return out;
}

MatrixXcd liouvillian(const MatrixXcd& hamiltonian, const NoiseModel& noise, int n_local) {
  const Eigen::Index d = Eigen::Index{1} << n_local;
  if (hamiltonian.rows() != d || hamiltonian.cols() != d) {
    throw DomainError("Hamiltonian must be 2^n_local square");
  }
  const MatrixXcd id = MatrixXcd::Identity(d, d);
  const Complex i{0.0, 1.0};
  // vec(A X B) = (B^T (x) A) vec(X)
  MatrixXcd l = -i * (Eigen::kroneckerProduct(id, hamiltonian).eval() -
                      Eigen::kroneckerProduct(hamiltonian.transpose(), id).eval());
  for (const auto& a : jump_operators(noise, n_local)) {
    const MatrixXcd ada = a.adjoint() * a;
    l += Eigen::kroneckerProduct(a.conjugate(), a).eval();
    l -= 0.5 * Eigen::kroneckerProduct(id, ada).eval();
    l -= 0.5 * Eigen::kroneckerProduct(ada.transpose(), id).eval();
  }
  return l;
}

// --------------------------------------------------------------- GateChannel

GateChannel::GateChannel(MatrixXcd ideal, MatrixXcd superop)
    : ideal_(std::move(ideal)), superop_(std::move(superop)) {
  const auto d = ideal_.rows();
  if (ideal_.cols() != d || superop_.rows() != d * d || superop_.cols() != d * d) {
    throw DomainError("channel dimensions inconsistent");
  }
}

GateChannel GateChannel::unitary(const MatrixXcd& u) {
  return GateChannel(u, Eigen::kroneckerProduct(u.conjugate(), u).eval());
}

MatrixXcd GateChannel::apply(const MatrixXcd& rho) const {
  const auto d = ideal_.rows();
  if (rho.rows() != d || rho.cols() != d) throw DomainError("rho dimension mismatch");
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
  const Eigen::VectorXcd w = superop_ * v;
  return Eigen::Map<const MatrixXcd>(w.data(), d, d);
}

MatrixXcd GateChannel::choi() const {
  const auto d = ideal_.rows();
  MatrixXcd j = MatrixXcd::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      // E(|a><b|) is column a + d*b of S, unvec'd column-major.
      const auto col = superop_.col(a + d * b);
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) j(a * d + r, b * d + c) = col(r + d * c);
      }
    }
  }
  return j;
}

std::vector<MatrixXcd> GateChannel::kraus(double cutoff) const {
  const auto d = ideal_.rows();
  const MatrixXcd j = choi();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (j + j.adjoint()));
  std::vector<MatrixXcd> ops;
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda <= cutoff) continue;
    MatrixXcd kop(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index r = 0; r < d; ++r) {
        kop(r, a) = std::sqrt(lambda) * es.eigenvectors()(a * d + r, k);
      }
    }
    ops.push_back(std::move(kop));
  }
  return ops;
}

double GateChannel::trace_preservation_defect() const {
  // (sum_k K^dag K)(i, j) = tr E(|j><i|)
  const auto d = ideal_.rows();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Complex tr{};
      for (Eigen::Index a = 0; a < d; ++a) tr += superop_(a + d * a, j + d * i);
      worst = std::max(worst, std::abs(tr - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double GateChannel::choi_min_eigenvalue() const {
  const MatrixXcd j = choi();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (j + j.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

GateChannel noisy_gate_channel(const GateSpec& gate, const NoiseModel& noise) {
  noise.validate();
  const MatrixXcd u = gate.unitary();
  if (gate.duration <= 0.0) {
    if (gate.generator.size() > 0 && gate.generator.cwiseAbs().maxCoeff() > 0.0) {
      throw DomainError("zero-duration gate " + gate.name() + " has a nonzero generator");
    }
    return GateChannel::unitary(u);
  }
  const MatrixXcd l = liouvillian(gate.generator, noise, gate.arity());
  return GateChannel(u, (l * gate.duration).exp());
}

GateChannel idle_channel(double duration, const NoiseModel& noise) {
  noise.validate();
  if (duration < 0.0) throw DomainError("idle duration must be >= 0");
  const MatrixXcd id = MatrixXcd::Identity(2, 2);
  if (duration == 0.0) return GateChannel::unitary(id);
  const MatrixXcd l = liouvillian(MatrixXcd::Zero(2, 2), noise, 1);
  return GateChannel(id, (l * duration).exp());
}

double process_fidelity(const GateChannel& channel) {
  const double d = channel.dim();
  const MatrixXcd target = Eigen::kroneckerProduct(channel.ideal().conjugate(), channel.ideal());
  return (target.adjoint() * channel.superoperator()).trace().real() / (d * d);
}

double average_gate_fidelity(const GateChannel& channel) {
  const double d = channel.dim();
  return (d * process_fidelity(channel) + 1.0) / (d + 1.0);
}

}  // namespace qcaw
