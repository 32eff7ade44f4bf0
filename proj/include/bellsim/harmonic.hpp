#pragma once

#include <vector>

#include "bellsim/model.hpp"

namespace bellsim {

// QPT location: the effective potential bifurcates into a double well here.
inline constexpr double kQptGamma = -1.0;

// Effective potential in imbalance coordinate, V_eff(z) = -sqrt(1-z^2)
// + gamma*z^2/2, in units of the dimensionless energy 2E/(Omega*N).
// Requires |z| <= 1.
double v_eff(double z, double gamma);

// Quadratic expansion of V_eff around the minima ±z0 (gamma < -1):
//   z0 = sqrt(1 - 1/gamma^2), omega = sqrt(gamma*(1 - gamma^2)),
//   v0 = V_eff(z0) = -(gamma^2 + 1)/(2|gamma|).
struct WellParameters {
  double gamma = 0.0;
  double z0 = 0.0;
  double omega = 0.0;
  double v0 = 0.0;
};

WellParameters well_parameters(double gamma);

// Twin-Gaussian harmonic ground state on the Dicke lattice,
//   psi_n ∝ exp(-(n_- - n)^2 omega/N) + exp(-(n_+ - n)^2 omega/N),
// with integer centers n_± = (N ± mu)/2, mu = select_mu. Normalized.
SymmetricState ha_ground_state(int n_qubits, double gamma);

// Antisymmetric twin (relative minus sign): approximates the first excited
// state across the tunneling barrier.
SymmetricState ha_excited_state(int n_qubits, double gamma);

// Harmonic-well level ladder. Each oscillator level is doubly degenerate
// (one state per well); `normalized` holds 2E/(Omega*N) values
// v0 + hbar_eff*omega*(j + 1/2) with hbar_eff = (2/N)/sqrt(|gamma|)
// (the kinetic coefficient of the z-space Schrödinger equation frozen at
// the well bottom), `raw` the same converted back by E = Ẽ*Omega*N/2.
struct HaEnergyLevels {
  std::vector<double> normalized;  // k entries, doubled: E0,E0,E1,E1,...
  std::vector<double> raw;
};

HaEnergyLevels ha_energies(const ModelParams& p, int k);

// Percent error |(E_exact - E_ha)/E_exact| * 100 of level i.
double energy_error_pct(double e_exact, double e_ha);

// Squared-overlap fidelity |⟨a|b⟩|^2 * 100 of two normalized states.
double fidelity_pct(const std::vector<double>& a, const std::vector<double>& b);

// Extensive Bell exponent Q_mu = N*f(gamma) with
//   f = sqrt(g^2-1)/|g| * (2*log2(sqrt(g^2-1) + |g|) - 1) - 2*log2|g|,
// valid for gamma <= -1 (f(-1) = 0). f crosses zero at the Bell onset.
double f_gamma(double gamma);

double q_mu_analytic(int n_qubits, double gamma);

// Root of f in [-1.31, -1.295] by bisection: gamma where macroscopic Bell
// violation first appears, distinct from the QPT at -1.
double find_bell_onset();

// Closed-form Q_mu of the twin-Gaussian state's inter-peak element:
//   Q = mu + 2*log2[ C((N+mu)/2, mu) / C(N, mu) ] + log2( omega/(2 pi N) ).
// At mu = N both binomials are 1, leaving N + log2(omega/(2 pi N)).
double q_mu_binomial(int n_qubits, double gamma);

}  // namespace bellsim
