#include <cmath>
#include <vector>

#include "bellsim/errors.hpp"
#include "bellsim/harmonic.hpp"
#include "bellsim/model.hpp"
#include "bellsim/spectral.hpp"
#include "doctest.h"

namespace {

using namespace bellsim;

std::vector<double> exact_vector(int n, double gamma, int col) {
  const SpectralDecomposition dec = parity_project(
      diagonalize(build_hamiltonian(params_from_gamma(n, gamma))));
  return std::vector<double>(dec.eigenvectors.col(col).data(),
                             dec.eigenvectors.col(col).data() + n + 1);
}

}  // namespace

TEST_SUITE_BEGIN("harmonic");

TEST_CASE("effective_potential_single_versus_double_well") {
  // Above gamma=-1 a single minimum at z=0; below, degenerate minima at
  // +-z0 with depth v0 = -(gamma^2+1)/(2|gamma|).
  CHECK(v_eff(0.0, -0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(v_eff(1.0, -0.5) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(v_eff(-1.0, -0.5) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(v_eff(0.3, -1.8) == v_eff(-0.3, -1.8));
  CHECK_THROWS_AS(v_eff(1.0001, -1.5), DomainError);

  const WellParameters w = well_parameters(-1.5);
  CHECK(w.z0 == doctest::Approx(std::sqrt(1.0 - 1.0 / 2.25)).epsilon(1e-14));
  CHECK(w.omega ==
        doctest::Approx(std::sqrt(-1.5 * (1.0 - 2.25))).epsilon(1e-14));
  CHECK(w.v0 == doctest::Approx(-(2.25 + 1.0) / 3.0).epsilon(1e-14));
  CHECK(v_eff(w.z0, -1.5) == doctest::Approx(w.v0).epsilon(1e-14));
  // z0 is a minimum: nudging either way raises the potential.
  CHECK(v_eff(w.z0 + 1e-4, -1.5) > w.v0);
  CHECK(v_eff(w.z0 - 1e-4, -1.5) > w.v0);
  CHECK_THROWS_AS(well_parameters(-1.0), DomainError);
  CHECK_THROWS_AS(well_parameters(-0.3), DomainError);
}

TEST_CASE("twin_gaussian_profile_is_frozen") {
  const SymmetricState psi = ha_ground_state(500, -1.5);
  REQUIRE(psi.amplitudes.size() == 501);
  int argmax = 0;
  double norm2 = 0.0;
  for (int i = 0; i <= 500; ++i) {
    if (psi.amplitudes[i] > psi.amplitudes[argmax]) argmax = i;
    norm2 += psi.amplitudes[i] * psi.amplitudes[i];
    CHECK(psi.amplitudes[i] == psi.amplitudes[500 - i]);
  }
  CHECK(argmax == 63);  // n_- = (500 - 374)/2
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(psi.amplitudes[63] ==
        doctest::Approx(0.1444899666522752).epsilon(1e-10));
  CHECK(psi.amplitudes[437] ==
        doctest::Approx(0.1444899666522752).epsilon(1e-10));

  const SymmetricState anti = ha_excited_state(500, -1.5);
  for (int i = 0; i <= 500; ++i) {
    CHECK(anti.amplitudes[i] == -anti.amplitudes[500 - i]);
  }
  CHECK(anti.amplitudes[63] > 0.0);
}

TEST_CASE("harmonic_ladder_doubles_every_level") {
  // Two degenerate wells: each oscillator level appears twice. In the
  // dimensionless scale E~ = v0 + hbar_eff*omega*(j + 1/2) with
  // hbar_eff = (2/N)/sqrt(|gamma|).
  const ModelParams p = params_from_gamma(200, -1.5);
  const HaEnergyLevels lv = ha_energies(p, 6);
  REQUIRE(lv.normalized.size() == 6);
  REQUIRE(lv.raw.size() == 6);
  const WellParameters w = well_parameters(-1.5);
  const double hbar_eff = (2.0 / 200.0) / std::sqrt(1.5);
  for (int i = 0; i < 6; ++i) {
    const int j = i / 2;
    CHECK(lv.normalized[i] ==
          doctest::Approx(w.v0 + hbar_eff * w.omega * (j + 0.5))
              .epsilon(1e-13));
    CHECK(lv.raw[i] ==
          doctest::Approx(lv.normalized[i] * 200.0 / 2.0).epsilon(1e-13));
  }
}

TEST_CASE("energy_error_percent_definition") {
  CHECK(energy_error_pct(-100.0, -99.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(energy_error_pct(-100.0, -101.0) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(energy_error_pct(50.0, 50.0) == 0.0);
  // Identical and orthogonal states hit the endpoints exactly.
  CHECK(fidelity_pct({1.0, 0.0}, {1.0, 0.0}) == 100.0);
  CHECK(fidelity_pct({1.0, 0.0}, {0.0, 1.0}) == 0.0);
}

TEST_CASE("harmonic_energies_track_exact_levels_at_large_n") {
  const ModelParams p = params_from_gamma(500, -1.1);
  const SpectralDecomposition dec = diagonalize(build_hamiltonian(p), 2);
  const HaEnergyLevels lv = ha_energies(p, 2);
  const double de0 = energy_error_pct(dec.eigenvalues[0], lv.raw[0]);
  const double de1 = energy_error_pct(dec.eigenvalues[1], lv.raw[1]);
  CHECK(de0 == doctest::Approx(0.2203).epsilon(5e-3));
  CHECK(de1 == doctest::Approx(0.2203).epsilon(5e-3));
}

TEST_CASE("fidelity_freeze_table") {
  struct Row {
    int n;
    double gamma;
    double f0;
    double f1;
  };
  const Row rows[] = {{100, -1.4, 98.6811, 98.6812},
                      {100, -1.1, 87.4595, 98.2848},
                      {100, -1.5, 96.8242, 96.8242},
                      {500, -1.1, 98.2909, 98.2933},
                      {500, -1.5, 98.9896, 98.9896}};
  for (const Row& row : rows) {
    const std::vector<double> psi0 = exact_vector(row.n, row.gamma, 0);
    const std::vector<double> psi1 = exact_vector(row.n, row.gamma, 1);
    const SymmetricState ha0 = ha_ground_state(row.n, row.gamma);
    const SymmetricState ha1 = ha_excited_state(row.n, row.gamma);
    CAPTURE(row.n);
    CAPTURE(row.gamma);
    CHECK(fidelity_pct(psi0, ha0.amplitudes) ==
          doctest::Approx(row.f0).epsilon(2e-5));
    CHECK(fidelity_pct(psi1, ha1.amplitudes) ==
          doctest::Approx(row.f1).epsilon(2e-5));
  }
}

TEST_CASE("extensive_exponent_and_onset") {
  CHECK(f_gamma(-1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(f_gamma(-1.5) ==
        doctest::Approx(0.15454848833455521883).epsilon(1e-14));
  CHECK(f_gamma(-1.25) ==
        doctest::Approx(-0.043856189774724695741).epsilon(1e-13));
  CHECK(q_mu_analytic(500, -1.5) ==
        doctest::Approx(77.274244167277609417).epsilon(1e-13));
  CHECK(q_mu_analytic(100, -1.5) ==
        doctest::Approx(15.454848833455515).epsilon(1e-13));
  CHECK_THROWS_AS(f_gamma(-0.9), DomainError);

  const double root = find_bell_onset();
  CHECK(root == doctest::Approx(-1.3016310695061548).epsilon(1e-12));
  CHECK(std::abs(f_gamma(root)) < 1e-13);
  CHECK(root > -1.31);
  CHECK(root < -1.295);
}

TEST_CASE("binomial_closed_form_and_extensive_limit") {
  CHECK(q_mu_binomial(100, -1.5) ==
        doctest::Approx(10.091808565514834).epsilon(1e-12));
  CHECK(q_mu_binomial(1000, -1.5) ==
        doctest::Approx(144.33352286815702).epsilon(1e-12));
  // mu = N collapses both binomials to 1: Q = N + log2(omega/(2 pi N)).
  const double direct =
      10.0 + std::log2(well_parameters(-50.0).omega / (2.0 * M_PI * 10.0));
  CHECK(q_mu_binomial(10, -50.0) == doctest::Approx(direct).epsilon(1e-13));
  // Per-qubit deviation from the extensive form shrinks with N.
  const double dev100 =
      std::abs(q_mu_binomial(100, -1.5) - q_mu_analytic(100, -1.5)) / 100.0;
  const double dev1000 =
      std::abs(q_mu_binomial(1000, -1.5) - q_mu_analytic(1000, -1.5)) / 1000.0;
  CHECK(dev100 == doctest::Approx(0.05363040267940681).epsilon(1e-9));
  CHECK(dev1000 == doctest::Approx(0.010214965466398126).epsilon(1e-9));
  CHECK(dev1000 < dev100);
}

TEST_SUITE_END();
