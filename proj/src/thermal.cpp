#include "bellsim/thermal.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bellsim/errors.hpp"
#include "bellsim/harmonic.hpp"

namespace bellsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

double log_binom(double a, double b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

// Relative Boltzmann weight below which a level cannot move any band
// element at double precision.
constexpr double kWeightCutoff = 1e-16;

}  // namespace

std::vector<double> ThermalDensity::band(int m) const {
  if (m < 0 || m > n_qubits) {
    throw DomainError("band order must be in [0, N]");
  }
  const int len = n_qubits - m + 1;
  std::vector<double> out(len, 0.0);
  if (identity_limit) {
    // Completeness sum_k psi_k psi_k^T == I holds exactly in exact
    // arithmetic; materializing it from solver eigenvectors would leave
    // ~1e-15 junk off the diagonal, so the identity is emitted directly.
    if (m == 0) {
      const double w = 1.0 / (n_qubits + 1);
      for (double& v : out) v = w;
    }
    return out;
  }
  for (int k = 0; k < n_levels_kept; ++k) {
    const double w = weights[k];
    const auto& col = vectors.col(k);
    for (int i = 0; i < len; ++i) out[i] += w * col[i] * col[i + m];
  }
  return out;
}

double ThermalDensity::trace() const {
  const std::vector<double> diag = band(0);
  double t = 0.0;
  for (double v : diag) t += v;
  return t;
}

ThermalDensity thermal_density(const SpectralDecomposition& dec, double beta) {
  if (std::isnan(beta) || beta < 0.0) {
    throw DomainError("thermal_density requires beta >= 0");
  }
  const int levels = static_cast<int>(dec.eigenvalues.size());
  if (levels == 0) throw DomainError("empty decomposition");

  ThermalDensity rho;
  rho.n_qubits = dec.n_qubits;
  rho.beta = beta;

  if (beta == 0.0) {
    if (levels != dec.n_qubits + 1) {
      throw DomainError("beta = 0 requires the full spectrum");
    }
    rho.identity_limit = true;
    rho.n_levels_kept = levels;
    rho.truncation_weight = 0.0;
    rho.log_partition = std::log(static_cast<double>(levels));
    return rho;
  }

  const double e0 = dec.eigenvalues[0];
  std::vector<double> w(levels);
  double z = 0.0;
  for (int i = 0; i < levels; ++i) {
    const double gap = dec.eigenvalues[i] - e0;
    // beta = inf picks the ground manifold with equal weights; the explicit
    // branch avoids 0 * inf = NaN for gap-degenerate levels.
    w[i] = (beta == kInf) ? (gap == 0.0 ? 1.0 : 0.0) : std::exp(-gap * beta);
    z += w[i];
  }
  rho.log_partition = std::log(z);

  double dropped = 0.0;
  std::vector<int> kept;
  for (int i = 0; i < levels; ++i) {
    if (w[i] / z >= kWeightCutoff) {
      kept.push_back(i);
    } else {
      dropped += w[i];
    }
  }
  rho.n_levels_kept = static_cast<int>(kept.size());
  rho.truncation_weight = dropped / z;
  rho.weights.resize(kept.size());
  rho.vectors.resize(dec.n_qubits + 1, static_cast<int>(kept.size()));
  // Renormalize over the kept set so the stored density has unit trace.
  const double z_kept = z - dropped;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    rho.weights[k] = w[kept[k]] / z_kept;
    rho.vectors.col(static_cast<int>(k)) = dec.eigenvectors.col(kept[k]);
  }
  return rho;
}

ThermalCorrelator thermal_q_mu(const ModelParams& p, double beta, int m) {
  const int mu = (m > 0) ? m : select_mu(p.n_qubits, p.gamma());
  const SpectralDecomposition dec =
      parity_project(diagonalize(build_hamiltonian(p)));
  const ThermalDensity rho = thermal_density(dec, beta);
  ThermalCorrelator out;
  out.mu = mu;
  out.beta = beta;
  out.result = q_m_from_band(rho.band(mu), mu, p.n_qubits);
  return out;
}

double kitten_q_mu(int n_qubits, int mu, double delta_1, double beta) {
  if (mu < 0 || mu > n_qubits || (n_qubits - mu) % 2 != 0) {
    throw DomainError("kitten_q_mu requires 0 <= mu <= N with mu ≡ N (mod 2)");
  }
  if (delta_1 < 0.0 || std::isnan(beta) || beta < 0.0) {
    throw DomainError("kitten_q_mu requires delta_1 >= 0 and beta >= 0");
  }
  // A degenerate kitten pair is an equal mixture at any temperature.
  const double arg = (delta_1 == 0.0) ? 0.0 : delta_1 * beta / 2.0;
  const double th = std::tanh(arg);
  if (th == 0.0) return -kInf;
  const double log2_amp = -1.0 + (log_binom((n_qubits + mu) / 2, mu) -
                                  log_binom(n_qubits, mu)) /
                                     kLn2 +
                          std::log2(th);
  return mu + 2.0 * log2_amp;
}

CriticalTemperature critical_temperature(int n_qubits, double field,
                                         double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("fraction must be in (0, 1]");
  }
  CriticalTemperature ct;
  ct.fraction = fraction;
  ct.gamma_ref = find_bell_onset();
  const ModelParams p = params_from_gamma(n_qubits, ct.gamma_ref, field);
  const SpectralDecomposition dec = diagonalize(build_hamiltonian(p), 2);
  ct.delta_1 = dec.eigenvalues[1] - dec.eigenvalues[0];
  ct.k_b_t_star = fraction * ct.delta_1;
  return ct;
}

}  // namespace bellsim
