#include "bellsim/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bellsim/errors.hpp"
#include "bellsim/harmonic.hpp"

namespace bellsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

double log_binom(double a, double b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

// ln( N! / (N-m)! ), the falling factorial in the Bell normalization.
double log_perm(int n, int m) {
  return std::lgamma(n + 1.0) - std::lgamma(n - m + 1.0);
}

}  // namespace

SignedLogValue SignedLogValue::zero() { return {0, -kInf}; }

SignedLogValue SignedLogValue::from_value(double v) {
  if (v == 0.0) return zero();
  return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
}

double log_j(int n, int m, int n_qubits) {
  if (m < 0 || n < 0 || m > n || n > n_qubits) {
    throw DomainError("log_j requires 0 <= m <= n <= N (n=" +
                      std::to_string(n) + ", m=" + std::to_string(m) +
                      ", N=" + std::to_string(n_qubits) + ")");
  }
  return std::lgamma(m + 1.0) +
         0.5 * (log_binom(n, m) + log_binom(n_qubits - n + m, m));
}

SignedLogValue jplus_moment(const std::vector<double>& band, int m,
                            int n_qubits) {
  if (m < 0 || m > n_qubits) {
    throw DomainError("moment order m must be in [0, N]");
  }
  if (static_cast<int>(band.size()) != n_qubits - m + 1) {
    throw DomainError("band size must be N - m + 1");
  }

  // Signed log-sum-exp, shifted by the running maximum: terms are
  // rho_{n, n+m} * j_{n+m, m} with magnitudes spanning hundreds of decades
  // at N = 500, so the sum must never leave log space.
  struct Term {
    double sign;
    double log_mag;
  };
  std::vector<Term> terms;
  terms.reserve(band.size());
  double max_log = -kInf;
  for (int i = 0; i < static_cast<int>(band.size()); ++i) {
    const double rho = band[i];
    if (rho == 0.0) continue;
    const double lm = std::log(std::abs(rho)) + log_j(i + m, m, n_qubits);
    terms.push_back({rho > 0.0 ? 1.0 : -1.0, lm});
    max_log = std::max(max_log, lm);
  }
  if (terms.empty()) return SignedLogValue::zero();

  double acc = 0.0;
  for (const Term& t : terms) acc += t.sign * std::exp(t.log_mag - max_log);
  if (acc == 0.0) return SignedLogValue::zero();
  return {acc > 0.0 ? 1 : -1, max_log + std::log(std::abs(acc))};
}

CorrelatorResult correlator_from_moment(const SignedLogValue& moment, int m,
                                        int n_qubits) {
  CorrelatorResult r;
  r.m = m;
  r.moment = moment;
  if (moment.sign == 0) {
    r.q = -kInf;
    r.bound_violated = false;
    return r;
  }
  r.q = m + 2.0 * moment.log_abs / kLn2 - 2.0 * log_perm(n_qubits, m) / kLn2;
  r.bound_violated = r.q > 0.0;
  return r;
}

CorrelatorResult q_m_from_band(const std::vector<double>& band, int m,
                               int n_qubits) {
  return correlator_from_moment(jplus_moment(band, m, n_qubits), m, n_qubits);
}

int select_mu(int n_qubits, double gamma) {
  if (!(gamma < -1.0)) {
    throw DomainError("select_mu requires gamma < -1 (double-well regime)");
  }
  const double z0 = std::sqrt(1.0 - 1.0 / (gamma * gamma));
  const double target = n_qubits * z0;
  // Snap guards the ceiling when N*z0 sits on (or a few ulps above) an
  // integer; the parity bump then matches mu to N mod 2 so the peak centers
  // (N ± mu)/2 are lattice sites.
  int mu = static_cast<int>(std::ceil(target - 1e-9));
  if ((mu - n_qubits) % 2 != 0) ++mu;
  return std::min(mu, n_qubits);
}

double q_mu_peak(double rho_peak_element, int mu, int n_qubits) {
  if (mu < 0 || mu > n_qubits || (n_qubits - mu) % 2 != 0) {
    throw DomainError("q_mu_peak requires 0 <= mu <= N with mu ≡ N (mod 2)");
  }
  if (rho_peak_element == 0.0) return -kInf;
  const double log_weight =
      std::lgamma(mu + 1.0) + log_binom((n_qubits + mu) / 2, mu);
  const double log_moment = std::log(std::abs(rho_peak_element)) + log_weight;
  return mu + 2.0 * log_moment / kLn2 - 2.0 * log_perm(n_qubits, mu) / kLn2;
}

int depth_bound(double q, int mu) {
  if (q == -kInf) {
    throw DomainError("depth bound undefined for a vanishing correlator");
  }
  return static_cast<int>(std::floor(mu - 2.0 - q + 1e-12));
}

std::vector<CorrelatorResult> bell_scan(const SymmetricState& state,
                                        int m_min, int m_max) {
  const int n = state.n_qubits;
  if (static_cast<int>(state.amplitudes.size()) != n + 1) {
    throw DomainError("state dimension mismatch");
  }
  if (m_max < 0) m_max = n;
  if (m_min < 1 || m_min > m_max || m_max > n) {
    throw DomainError("bell_scan range must satisfy 1 <= m_min <= m_max <= N");
  }
  std::vector<CorrelatorResult> out;
  out.reserve(m_max - m_min + 1);
  for (int m = m_min; m <= m_max; ++m) {
    std::vector<double> band(n - m + 1);
    for (int i = 0; i + m <= n; ++i) {
      band[i] = state.amplitudes[i] * state.amplitudes[i + m];
    }
    out.push_back(q_m_from_band(band, m, n));
  }
  return out;
}

}  // namespace bellsim
