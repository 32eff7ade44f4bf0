#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bellsim {

// Fully-connected N-qubit chain in a transverse field,
//
//   H = -Omega * sum_k sigma_x^(k) + (U/2) * sum_{i != j} sigma_z^(i) sigma_z^(j),
//
// restricted to the permutation-symmetric (Dicke) subspace, where it takes
// the two-mode Bose-Hubbard form H = -Omega*J_x + U*J_z^2 (up to the affine
// shift a=2, b=-U*N/2 relating the two spectra; see symmetric_sector_oracle).
// The single control parameter is gamma = U*N/Omega; the double well opens
// at gamma < -1.
struct ModelParams {
  int n_qubits = 1;          // N >= 1
  double field = 1.0;        // Omega > 0
  double interaction = 0.0;  // U = gamma*field/N

  double gamma() const { return interaction * n_qubits / field; }
};

// gamma is the natural knob; U = gamma/N at Omega = 1.
ModelParams params_from_gamma(int n_qubits, double gamma, double field = 1.0);
ModelParams params_from_interaction(int n_qubits, double interaction,
                                    double field = 1.0);

// Throws DomainError on N < 1, field <= 0, or non-finite values.
void validate(const ModelParams& p);

// Dicke-basis state sum_n amp[n] |N-n, n⟩, n = number of down spins.
// All states in this codebase are real: Hamiltonian eigenstates, thermal
// bands and theta-coherent states carry no phase, and |⟨J_+^m⟩| is invariant
// under the z-rotation that would introduce one.
struct SymmetricState {
  int n_qubits = 0;
  std::vector<double> amplitudes;  // size N+1
};

// Population imbalance of |N-n, n⟩: z = 1 - 2n/N in [-1, 1].
double lattice_z(int n, int n_qubits);

// H restricted to the Dicke subspace, dimension N+1:
//   diag[n]    = U/4 * (N - 2n)^2
//   offdiag[n] = -Omega/2 * sqrt((N-n)(n+1))   (couples n and n+1)
struct TridiagonalHamiltonian {
  int n_qubits = 0;
  double field = 1.0;
  double interaction = 0.0;
  std::vector<double> diag;     // size N+1
  std::vector<double> offdiag;  // size N
};

TridiagonalHamiltonian build_hamiltonian(const ModelParams& p);

// --- Dense 2^N oracles (test/verification path, N <= 12) ---

// Full 2^N x 2^N matrix of H above. Bit k of a basis index encodes qubit k:
// 0 = sigma_z eigenvalue +1 (up), 1 = -1 (down).
Eigen::MatrixXd build_dense_ising(const ModelParams& p);

// Least-squares affine fit E_dense = a*E_bh + b between the
// symmetric-sector spectrum of the dense Hamiltonian and the tridiagonal
// spectrum. Analytically a = 2, b = -U*N/2.
struct AffineMapReport {
  double a = 0.0;
  double b = 0.0;
  double max_residual = 0.0;  // max_i |E_dense,i - a*E_bh,i - b|
};

AffineMapReport symmetric_sector_oracle(const ModelParams& p);

// ⟨psi| J_+^m |psi⟩ evaluated in the dense 2^N representation by embedding
// the Dicke state and applying the collective raising operator m times.
// Independent of the log-space band sum in the bell module.
double dense_moment_oracle(const SymmetricState& state, int m);

}  // namespace bellsim
