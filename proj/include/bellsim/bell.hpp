#pragma once

#include <vector>

#include "bellsim/model.hpp"

namespace bellsim {

// Signed log-magnitude scalar: sign in {-1, 0, +1}; log_abs = -inf iff
// sign == 0. Correlator moments span ~1e-300..1e+300 at N=500, so all
// accumulation happens in log space with a max-shifted signed sum.
struct SignedLogValue {
  int sign = 0;
  double log_abs = 0.0;  // natural log of |value|; -inf when sign == 0

  static SignedLogValue zero();
  static SignedLogValue from_value(double v);
};

// ln j_{n,m} where J_+^m |N-n, n⟩ = j_{n,m} |N-n+m, n-m⟩:
//   j_{n,m} = m! * sqrt( C(n,m) * C(N-n+m, m) ).
// Requires 0 <= m <= n <= N. Evaluated via lgamma; exact-integer
// cross-checked in tests for all N <= 20.
double log_j(int n, int m, int n_qubits);

// ⟨J_+^m⟩ from the m-th upper band of a density operator (or pure-state
// dyad): band[i] = rho_{i, i+m}, i = 0..N-m. The weight on band[i] is
// j_{i+m, m}: the raising operator connects |n=i+m⟩ to |n=i⟩, so the
// coefficient carries the upper index (pinned by the GHZ case, where the
// single element rho_{0,N} must be weighted by j_{N,N} = N!).
SignedLogValue jplus_moment(const std::vector<double>& band, int m,
                            int n_qubits);

// Bell correlator exponent Q_m = log2[ 2^m (N!/(N-m)!)^{-2} |⟨J_+^m⟩|^2 ];
// local-hidden-variable models obey Q_m <= 0.
struct CorrelatorResult {
  int m = 0;
  SignedLogValue moment;
  double q = 0.0;  // -inf when the moment vanishes
  bool bound_violated = false;  // q > 0
};

CorrelatorResult correlator_from_moment(const SignedLogValue& moment, int m,
                                        int n_qubits);

// Convenience: band -> moment -> Q_m.
CorrelatorResult q_m_from_band(const std::vector<double>& band, int m,
                               int n_qubits);

// Distinguished correlation order: smallest integer >= N*z0 with the parity
// of N (the inter-peak separation of the double-well ground state; the band
// m = mu connects the two wells). A 1e-9 snap guards the ceiling when N*z0
// is representable as an integer. Requires gamma < -1.
int select_mu(int n_qubits, double gamma);

// Single-element (inter-peak) approximation: keeps only the band element
// rho_{n-, n+} with n± = (N±mu)/2, whose weight is j_{n+, mu}
// = mu! * C((N+mu)/2, mu). Returns Q_mu; -inf on a vanishing element.
double q_mu_peak(double rho_peak_element, int mu, int n_qubits);

// Nonlocality-depth exponent: k_max = floor(mu - 2 - q); states reproducing
// the observed Q_mu need qubits Bell-correlated in groups of at least
// mu - k_max. The 1e-12 nudge keeps exact-integer q (GHZ) from flooring
// down a half-ulp.
int depth_bound(double q, int mu);

// Q_m for every order m in [m_min, m_max] of a pure symmetric state
// (m_max < 0 means N).
std::vector<CorrelatorResult> bell_scan(const SymmetricState& state,
                                        int m_min = 1, int m_max = -1);

}  // namespace bellsim
