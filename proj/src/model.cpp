#include "bellsim/model.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {

// Dense oracles build 2^N matrices; beyond this the oracle is pointless
// (and 2^13 squared doubles is already half a gigabyte).
constexpr int kMaxDenseQubits = 12;

void require_dense_size(int n) {
  if (n > kMaxDenseQubits) {
    throw DomainError("dense oracle limited to N <= " +
                      std::to_string(kMaxDenseQubits) + ", got N = " +
                      std::to_string(n));
  }
}

}  // namespace

ModelParams params_from_gamma(int n_qubits, double gamma, double field) {
  ModelParams p;
  p.n_qubits = n_qubits;
  p.field = field;
  p.interaction = gamma * field / n_qubits;
  validate(p);
  return p;
}

ModelParams params_from_interaction(int n_qubits, double interaction,
                                    double field) {
  ModelParams p;
  p.n_qubits = n_qubits;
  p.field = field;
  p.interaction = interaction;
  validate(p);
  return p;
}

void validate(const ModelParams& p) {
  if (p.n_qubits < 1) {
    throw DomainError("n_qubits must be >= 1, got " +
                      std::to_string(p.n_qubits));
  }
  if (!(p.field > 0.0) || !std::isfinite(p.field)) {
    throw DomainError("field must be positive and finite");
  }
  if (!std::isfinite(p.interaction)) {
    throw DomainError("interaction must be finite");
  }
}

double lattice_z(int n, int n_qubits) {
  return 1.0 - 2.0 * n / n_qubits;
}

TridiagonalHamiltonian build_hamiltonian(const ModelParams& p) {
  validate(p);
  const int n = p.n_qubits;
  TridiagonalHamiltonian h;
  h.n_qubits = n;
  h.field = p.field;
  h.interaction = p.interaction;
  h.diag.resize(n + 1);
  h.offdiag.resize(n);
  for (int k = 0; k <= n; ++k) {
    const double imbalance = static_cast<double>(n - 2 * k);
    h.diag[k] = p.interaction / 4.0 * imbalance * imbalance;
  }
  for (int k = 0; k < n; ++k) {
    h.offdiag[k] =
        -p.field / 2.0 * std::sqrt(static_cast<double>(n - k) * (k + 1));
  }
  return h;
}

Eigen::MatrixXd build_dense_ising(const ModelParams& p) {
  validate(p);
  require_dense_size(p.n_qubits);
  const int n = p.n_qubits;
  const std::int64_t dim = std::int64_t{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t s = 0; s < dim; ++s) {
    // sum_i z_i = N - 2*popcount: bit set = down spin = sigma_z eigenvalue -1.
    const double zsum = n - 2.0 * std::popcount(static_cast<std::uint64_t>(s));
    // sum_{i != j} z_i z_j = (sum z_i)^2 - N.
    h(s, s) = p.interaction / 2.0 * (zsum * zsum - n);
    for (int k = 0; k < n; ++k) {
      h(s ^ (std::int64_t{1} << k), s) += -p.field;
    }
  }
  return h;
}

namespace {

// Columns of the isometry P embedding the Dicke basis into the 2^N space:
// P(s, n) = 1/sqrt(C(N,n)) when popcount(s) = n.
Eigen::MatrixXd dicke_embedding(int n) {
  const std::int64_t dim = std::int64_t{1} << n;
  // Pascal row for C(N, n) in exact integer arithmetic (N <= 12).
  std::vector<double> binom(n + 1);
  binom[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    binom[k] = binom[k - 1] * (n - k + 1) / k;
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, n + 1);
  for (std::int64_t s = 0; s < dim; ++s) {
    const int k = std::popcount(static_cast<std::uint64_t>(s));
    p(s, k) = 1.0 / std::sqrt(binom[k]);
  }
  return p;
}

}  // namespace

AffineMapReport symmetric_sector_oracle(const ModelParams& p) {
  validate(p);
  require_dense_size(p.n_qubits);
  const int n = p.n_qubits;

  const Eigen::MatrixXd h_dense = build_dense_ising(p);
  const Eigen::MatrixXd embed = dicke_embedding(n);
  // The symmetric sector is invariant (H commutes with all permutations),
  // so the compression P^T H P carries the exact sector spectrum.
  const Eigen::MatrixXd h_sector = embed.transpose() * h_dense * embed;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_sector(h_sector);
  if (es_sector.info() != Eigen::Success) {
    throw ConvergenceError("dense sector eigensolver failed");
  }

  const TridiagonalHamiltonian h_bh = build_hamiltonian(p);
  Eigen::MatrixXd dense_bh = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) dense_bh(i, i) = h_bh.diag[i];
  for (int i = 0; i < n; ++i) {
    dense_bh(i, i + 1) = dense_bh(i + 1, i) = h_bh.offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_bh(dense_bh);
  if (es_bh.info() != Eigen::Success) {
    throw ConvergenceError("tridiagonal eigensolver failed");
  }

  // Least-squares fit E_sector = a*E_bh + b over the sorted spectra.
  const Eigen::VectorXd y = es_sector.eigenvalues();
  const Eigen::VectorXd x = es_bh.eigenvalues();
  const double dim = n + 1.0;
  const double sx = x.sum(), sy = y.sum();
  const double sxx = x.squaredNorm(), sxy = x.dot(y);
  const double det = dim * sxx - sx * sx;
  AffineMapReport report;
  report.a = (dim * sxy - sx * sy) / det;
  report.b = (sxx * sy - sx * sxy) / det;
  report.max_residual =
      (y - report.a * x - Eigen::VectorXd::Constant(x.size(), report.b))
          .cwiseAbs()
          .maxCoeff();
  return report;
}

double dense_moment_oracle(const SymmetricState& state, int m) {
  const int n = state.n_qubits;
  require_dense_size(n);
  if (static_cast<int>(state.amplitudes.size()) != n + 1) {
    throw DomainError("state dimension mismatch");
  }
  if (m < 0 || m > n) {
    throw DomainError("moment order m must be in [0, N]");
  }
  const Eigen::MatrixXd embed = dicke_embedding(n);
  Eigen::VectorXd amp(n + 1);
  for (int i = 0; i <= n; ++i) amp[i] = state.amplitudes[i];
  const Eigen::VectorXd psi = embed * amp;

  // Apply J_+ = sum_k |up_k⟩⟨down_k| m times: clearing a set bit raises
  // sigma_z from -1 to +1, moving |..n..⟩ toward fewer down spins.
  const std::int64_t dim = std::int64_t{1} << n;
  Eigen::VectorXd cur = psi;
  for (int step = 0; step < m; ++step) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(dim);
    for (std::int64_t s = 0; s < dim; ++s) {
      if (cur[s] == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        const std::int64_t bit = std::int64_t{1} << k;
        if (s & bit) next[s ^ bit] += cur[s];
      }
    }
    cur = next;
  }
  return psi.dot(cur);
}

}  // namespace bellsim
