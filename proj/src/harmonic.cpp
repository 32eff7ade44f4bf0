#include "bellsim/harmonic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bellsim/bell.hpp"
#include "bellsim/errors.hpp"

namespace bellsim {

namespace {

const double kLn2 = std::log(2.0);
const double kPi = std::acos(-1.0);

double log_binom(double a, double b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

void require_double_well(double gamma, const char* who) {
  if (!(gamma < -1.0)) {
    throw DomainError(std::string(who) +
                      " requires gamma < -1 (double-well regime)");
  }
}

}  // namespace

double v_eff(double z, double gamma) {
  if (!(std::abs(z) <= 1.0)) {
    throw DomainError("v_eff requires |z| <= 1");
  }
  if (!std::isfinite(gamma)) {
    throw DomainError("v_eff requires finite gamma");
  }
  return -std::sqrt(1.0 - z * z) + gamma * z * z / 2.0;
}

WellParameters well_parameters(double gamma) {
  require_double_well(gamma, "well_parameters");
  WellParameters w;
  w.gamma = gamma;
  w.z0 = std::sqrt(1.0 - 1.0 / (gamma * gamma));
  // gamma < -1 makes gamma*(1 - gamma^2) = (neg)*(neg) positive.
  w.omega = std::sqrt(gamma * (1.0 - gamma * gamma));
  w.v0 = -(gamma * gamma + 1.0) / (2.0 * std::abs(gamma));
  return w;
}

namespace {

SymmetricState twin_gaussian(int n_qubits, double gamma, double relative_sign) {
  require_double_well(gamma, "ha state");
  const int mu = select_mu(n_qubits, gamma);
  const double omega = well_parameters(gamma).omega;
  const int n_minus = (n_qubits - mu) / 2;
  const int n_plus = (n_qubits + mu) / 2;
  SymmetricState s;
  s.n_qubits = n_qubits;
  s.amplitudes.resize(n_qubits + 1);
  double norm2 = 0.0;
  for (int n = 0; n <= n_qubits; ++n) {
    const double dl = static_cast<double>(n_minus - n);
    const double dr = static_cast<double>(n_plus - n);
    const double a = std::exp(-dl * dl * omega / n_qubits) +
                     relative_sign * std::exp(-dr * dr * omega / n_qubits);
    s.amplitudes[n] = a;
    norm2 += a * a;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& a : s.amplitudes) a *= inv;
  return s;
}

}  // namespace

SymmetricState ha_ground_state(int n_qubits, double gamma) {
  return twin_gaussian(n_qubits, gamma, +1.0);
}

SymmetricState ha_excited_state(int n_qubits, double gamma) {
  return twin_gaussian(n_qubits, gamma, -1.0);
}

HaEnergyLevels ha_energies(const ModelParams& p, int k) {
  require_double_well(p.gamma(), "ha_energies");
  if (k < 1) throw DomainError("ha_energies requires k >= 1");
  const double gamma = p.gamma();
  const WellParameters w = well_parameters(gamma);
  // Kinetic coefficient of the z-space Schrödinger form frozen at the well
  // bottom, where sqrt(1 - z0^2) = 1/|gamma|.
  const double hbar_eff = 2.0 / (p.n_qubits * std::sqrt(std::abs(gamma)));
  HaEnergyLevels lv;
  lv.normalized.resize(k);
  lv.raw.resize(k);
  for (int i = 0; i < k; ++i) {
    const int oscillator_level = i / 2;  // one state per well
    const double e = w.v0 + hbar_eff * w.omega * (oscillator_level + 0.5);
    lv.normalized[i] = e;
    lv.raw[i] = e * p.field * p.n_qubits / 2.0;
  }
  return lv;
}

double energy_error_pct(double e_exact, double e_ha) {
  if (e_exact == 0.0) {
    throw DomainError("relative energy error undefined at E = 0");
  }
  return std::abs((e_exact - e_ha) / e_exact) * 100.0;
}

double fidelity_pct(const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw DomainError("fidelity requires equal-length states");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot * dot * 100.0;
}

double f_gamma(double gamma) {
  if (!(gamma <= -1.0)) {
    throw DomainError("f_gamma requires gamma <= -1");
  }
  const double g = std::abs(gamma);
  const double s = std::sqrt(g * g - 1.0);
  return s / g * (2.0 * std::log2(s + g) - 1.0) - 2.0 * std::log2(g);
}

double q_mu_analytic(int n_qubits, double gamma) {
  return n_qubits * f_gamma(gamma);
}

double find_bell_onset() {
  // f is negative just past the QPT and climbs through zero as the wells
  // separate; the bracket is the criterion interval itself.
  double lo = -1.31, hi = -1.295;  // f(lo) > 0 > f(hi)
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (f_gamma(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

double q_mu_binomial(int n_qubits, double gamma) {
  require_double_well(gamma, "q_mu_binomial");
  const int mu = select_mu(n_qubits, gamma);
  const double omega = well_parameters(gamma).omega;
  return mu +
         2.0 * (log_binom((n_qubits + mu) / 2, mu) - log_binom(n_qubits, mu)) /
             kLn2 +
         std::log2(omega / (2.0 * kPi * n_qubits));
}

}  // namespace bellsim
