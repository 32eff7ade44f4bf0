#include "bellsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {

// Solves (T - sigma) x = b for symmetric tridiagonal T via the Thomas
// algorithm. sigma sits strictly below the spectrum, so T - sigma is
// positive definite and unpivoted elimination is stable; with negative
// off-diagonals it is an M-matrix, whose inverse is entrywise positive —
// a positive right-hand side therefore yields a strictly positive solution.
Eigen::VectorXd shifted_tridiag_solve(const std::vector<double>& diag,
                                      const std::vector<double>& off,
                                      double sigma,
                                      const Eigen::VectorXd& rhs) {
  const int dim = static_cast<int>(diag.size());
  Eigen::VectorXd c(dim), d(dim);
  double piv = diag[0] - sigma;
  c[0] = off.empty() ? 0.0 : off[0] / piv;
  d[0] = rhs[0] / piv;
  for (int i = 1; i < dim; ++i) {
    piv = diag[i] - sigma - off[i - 1] * c[i - 1];
    c[i] = (i < dim - 1) ? off[i] / piv : 0.0;
    d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
  }
  Eigen::VectorXd x(dim);
  x[dim - 1] = d[dim - 1];
  for (int i = dim - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Exact reflection-symmetrization (x_n + x_{N-n})/2, then renormalize.
void symmetrize_and_normalize(Eigen::VectorXd& x) {
  const int dim = static_cast<int>(x.size());
  for (int i = 0; i < dim / 2; ++i) {
    const double avg = 0.5 * (x[i] + x[dim - 1 - i]);
    x[i] = avg;
    x[dim - 1 - i] = avg;
  }
  x /= x.norm();
}

// Deterministic sign convention: flip so the largest-magnitude component is
// positive; the lowest index wins magnitude ties (relevant for parity
// partners whose |psi_n| profile is exactly mirror-symmetric).
void fix_phase(Eigen::Ref<Eigen::MatrixXd> vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    int arg = 0;
    double best = -1.0;
    for (int r = 0; r < vectors.rows(); ++r) {
      const double mag = std::abs(vectors(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

}  // namespace

SpectralDecomposition diagonalize(const TridiagonalHamiltonian& h, int k) {
  const int n = h.n_qubits;
  const int dim = n + 1;
  if (k < 0) k = dim;
  if (k < 1 || k > dim) {
    throw DomainError("requested " + std::to_string(k) + " eigenpairs of a " +
                      std::to_string(dim) + "-dimensional operator");
  }

  Eigen::Map<const Eigen::VectorXd> diag(h.diag.data(), dim);
  Eigen::Map<const Eigen::VectorXd> off(h.offdiag.data(), n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError(
        "implicit-QL sweep failed to converge (dim = " + std::to_string(dim) +
        "); no eigenpair is trustworthy");
  }

  SpectralDecomposition dec;
  dec.n_qubits = n;
  dec.n_converged = dim;
  dec.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + k);
  dec.eigenvectors = solver.eigenvectors().leftCols(k);

  // Refine the ground state: two inverse-iteration solves from the all-ones
  // vector. The symmetric start has zero overlap with the antisymmetric
  // tunneling partner, so the iterate lands on the true nodeless ground
  // state even when the splitting underflows, with tails accurate far below
  // the QL backward error.
  if (dim > 1) {
    const double e0 = dec.eigenvalues[0];
    const double sigma = e0 - 1e-8 * std::max(1.0, std::abs(e0));
    Eigen::VectorXd x = Eigen::VectorXd::Ones(dim);
    for (int pass = 0; pass < 2; ++pass) {
      x = shifted_tridiag_solve(h.diag, h.offdiag, sigma, x);
      x /= x.norm();
    }
    symmetrize_and_normalize(x);
    dec.eigenvectors.col(0) = x;
  }

  fix_phase(dec.eigenvectors);
  return dec;
}

SpectralDecomposition parity_project(SpectralDecomposition dec, double tol) {
  const int dim = dec.n_qubits + 1;
  const int k = static_cast<int>(dec.eigenvalues.size());
  if (tol < 0.0) {
    tol = 1e-9 * std::max(1.0, std::abs(dec.eigenvalues.empty()
                                            ? 0.0
                                            : dec.eigenvalues[0]));
  }

  auto reflect = [dim](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(v.reverse());
  };

  int i = 0;
  while (i < k) {
    int j = i;
    while (j + 1 < k && dec.eigenvalues[j + 1] - dec.eigenvalues[j] < tol) ++j;
    if (j > i) {
      const int c = j - i + 1;
      Eigen::MatrixXd cluster = dec.eigenvectors.middleCols(i, c);
      // The reflection R restricted to the cluster span: M = V^T R V is
      // symmetric with eigenvalues ±1 (R is an involution and the
      // degenerate span is R-invariant up to solver noise). Its
      // eigenvectors rotate the cluster into parity eigenstates — robust
      // even when QL returns arbitrary well-localized mixtures, where
      // comparing norms of v ± Rv misclassifies both members.
      Eigen::MatrixXd reflected(dim, c);
      for (int col = 0; col < c; ++col) {
        reflected.col(col) = cluster.col(col).reverse();
      }
      Eigen::MatrixXd m = cluster.transpose() * reflected;
      m = 0.5 * (m + m.transpose().eval());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(m);
      // Ascending eigenvalues: antisymmetric (-1) first, so walk backwards
      // to put symmetric members first.
      Eigen::MatrixXd rotated(dim, c);
      std::vector<Eigen::VectorXd> kept;
      int out = 0;
      for (int s = c - 1; s >= 0; --s) {
        Eigen::VectorXd v = cluster * small.eigenvectors().col(s);
        const bool symmetric = small.eigenvalues()[s] > 0.0;
        Eigen::VectorXd r = reflect(v);
        v = symmetric ? Eigen::VectorXd(0.5 * (v + r))
                      : Eigen::VectorXd(0.5 * (v - r));
        // Re-orthogonalize inside the cluster, then repeat the cleanup:
        // the Gram-Schmidt subtraction reintroduces ~1e-17 of the opposite
        // parity, and downstream band sums rely on members being exact
        // reflection eigenvectors (bitwise v[n] == ±v[N-n]).
        for (const auto& u : kept) v -= u * u.dot(v);
        r = reflect(v);
        v = symmetric ? Eigen::VectorXd(0.5 * (v + r))
                      : Eigen::VectorXd(0.5 * (v - r));
        v /= v.norm();
        kept.push_back(v);
        rotated.col(out++) = v;
      }
      dec.eigenvectors.middleCols(i, c) = rotated;
    }
    i = j + 1;
  }

  fix_phase(dec.eigenvectors);
  return dec;
}

std::vector<double> gaps(const SpectralDecomposition& dec, int k) {
  if (k < 1 || k > static_cast<int>(dec.eigenvalues.size())) {
    throw DomainError("gap count " + std::to_string(k) +
                      " exceeds available levels");
  }
  std::vector<double> d(k);
  for (int i = 0; i < k; ++i) d[i] = dec.eigenvalues[i] - dec.eigenvalues[0];
  return d;
}

double normalized_energy(double energy, const ModelParams& p) {
  return 2.0 * energy / (p.field * p.n_qubits);
}

}  // namespace bellsim
