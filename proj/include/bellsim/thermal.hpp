#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bellsim/bell.hpp"
#include "bellsim/model.hpp"
#include "bellsim/spectral.hpp"

namespace bellsim {

// Canonical Gibbs state rho = Z^{-1} sum_n e^{-E_n beta} |psi_n⟩⟨psi_n| in
// the Dicke subspace, assembled band-by-band on demand (⟨J_+^m⟩ reads a
// single band, so the full (N+1)^2 matrix is never materialized).
//
// Boltzmann weights are referenced to E_0 (w_n = e^{-(E_n-E_0)beta}) so the
// partition sum never underflows; log_partition stores ln sum_n w_n, i.e.
// ln Z shifted by +beta*E_0. Levels with relative weight < 1e-16 are
// dropped; truncation_weight records the discarded fraction.
struct ThermalDensity {
  int n_qubits = 0;
  double beta = 0.0;
  double log_partition = 0.0;  // ln(Z * e^{beta*E_0})
  int n_levels_kept = 0;
  double truncation_weight = 0.0;
  bool identity_limit = false;  // beta == 0: rho is exactly I/(N+1)

  std::vector<double> weights;  // kept probabilities, sum == 1
  Eigen::MatrixXd vectors;      // (N+1) x n_levels_kept

  // Band m: rho_{n, n+m} for n = 0..N-m. At beta == 0 the completeness
  // relation is used directly (exact zeros off the diagonal) instead of
  // summing solver eigenvectors, so the identity limit holds bitwise.
  std::vector<double> band(int m) const;

  double trace() const;  // sum of band(0); 1 up to roundoff
};

// beta >= 0; beta = +inf selects the (possibly degenerate) ground manifold
// with equal weights. Expects a parity-projected decomposition when the
// splitting is near degenerate.
ThermalDensity thermal_density(const SpectralDecomposition& dec, double beta);

// Full pipeline: build -> diagonalize -> parity_project -> thermal_density
// -> band(mu) -> Q_mu. The order mu defaults to select_mu(N, gamma); pass
// m > 0 to override.
struct ThermalCorrelator {
  int mu = 0;
  double beta = 0.0;
  CorrelatorResult result;
};

ThermalCorrelator thermal_q_mu(const ModelParams& p, double beta, int m = 0);

// Kitten-model closed form: the two lowest levels replaced by
// (|n_-⟩ ± |n_+⟩)/sqrt(2) split by delta_1 gives exactly
//   Q_mu = log2( 2^mu | (1/2) C(N,mu)^{-1} C((N+mu)/2, mu)
//                      tanh(delta_1*beta/2) |^2 ).
// -inf at beta = 0 (the ± bands cancel); at beta -> inf and mu = N this is
// the GHZ value N-2. delta_1 == 0 is treated as tanh-argument 0 at any
// beta (degenerate kitten pair stays an equal mixture).
double kitten_q_mu(int n_qubits, int mu, double delta_1, double beta);

// Thermal fragility scale: k_b T* = fraction * delta_1 evaluated at the
// Bell onset gamma (where Q_mu first turns positive). fraction defaults to
// the 10% working definition.
struct CriticalTemperature {
  double k_b_t_star = 0.0;
  double delta_1 = 0.0;
  double fraction = 0.0;
  double gamma_ref = 0.0;
};

CriticalTemperature critical_temperature(int n_qubits, double field = 1.0,
                                         double fraction = 0.1);

}  // namespace bellsim
