#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bellsim/model.hpp"

namespace bellsim {

// Eigendecomposition of the Dicke-subspace Hamiltonian.
//
// Invariants maintained by diagonalize/parity_project:
//  - eigenvalues ascending; ties (degenerate within tolerance) ordered with
//    the reflection-symmetric state first
//  - each eigenvector's largest-magnitude component is positive (lowest
//    index wins a magnitude tie), so phases are deterministic
//  - the ground state is strictly positive (Perron-Frobenius) and exactly
//    reflection-symmetric
struct SpectralDecomposition {
  int n_qubits = 0;
  std::vector<double> eigenvalues;  // ascending, k entries
  Eigen::MatrixXd eigenvectors;     // (N+1) x k, column i <-> eigenvalues[i]
  int n_converged = 0;
};

// Implicit-QL on the tridiagonal form; k < 0 keeps all N+1 pairs, otherwise
// the lowest k. The raw QL ground state is refined by two shifted
// inverse-iteration solves started from the all-ones vector: the shifted
// matrix is a positive-definite M-matrix, so the solve preserves strict
// positivity, and the symmetric start keeps the iterate orthogonal to the
// antisymmetric partner even when the tunneling splitting underflows.
// Throws ConvergenceError if the QL sweep fails.
SpectralDecomposition diagonalize(const TridiagonalHamiltonian& h, int k = -1);

// Rotates near-degenerate clusters (|E_i - E_j| < tol) into exact parity
// eigenstates of the reflection n -> N-n, symmetric member first. Needed
// deep in the broken phase where the splitting falls below solver
// resolution and QL returns arbitrary mixtures of the well-localized pair.
// tol < 0 selects the default 1e-9 * max(1, |E_0|).
SpectralDecomposition parity_project(SpectralDecomposition dec,
                                     double tol = -1.0);

// Gaps delta_i = E_i - E_0 for i = 0..k-1 (delta_0 == 0).
std::vector<double> gaps(const SpectralDecomposition& dec, int k);

// Dimensionless energy in effective-potential units: 2E/(Omega*N).
double normalized_energy(double energy, const ModelParams& p);

}  // namespace bellsim
