#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracle.hpp"
#include "spinbath/spectrum.hpp"

using namespace spinbath;

namespace {

SpinModel heisenberg_pair(double j) {
  SpinModel m;
  m.n_system = 2;
  m.system_bonds = {{0, 1, j, j, j}};
  return m;
}

}  // namespace

TEST_CASE("two-spin Heisenberg bond: triplet at -1/4, singlet at +3/4") {
  const SpectrumSummary s = diagonalize(heisenberg_pair(1.0), Part::System);
  REQUIRE(s.dim() == 4);
  for (int k = 0; k < 3; ++k) CHECK(s.eigenvalues(k) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(s.eigenvalues(3) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(s.ground_degeneracy() == 3);
}

TEST_CASE("single coupling bond model matches the dense oracle") {
  const SpinModel m = build_chain_model(1, 1, 0, 0, 1, 1);
  const SpectrumSummary s = diagonalize(m, Part::Full);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::dense(m, Part::Full));
  for (int k = 0; k < 4; ++k) CHECK(std::abs(s.eigenvalues(k) - es.eigenvalues()(k)) < 1e-14);
}

TEST_CASE("zero Hamiltonian") {
  SpinModel m;
  m.n_system = 3;
  const SpectrumSummary s = diagonalize(m, Part::System);
  CHECK(s.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.ground_degeneracy() == 8);
}

TEST_CASE("ferromagnetic chain degeneracies") {
  const SpinModel m = build_chain_model(4, 8, 1.0, 1.0, 1.0, 1.0);
  CHECK(diagonalize(m, Part::System).ground_degeneracy() == 5);
  CHECK(diagonalize(m, Part::Environment).ground_degeneracy() == 9);
  CHECK(diagonalize(build_chain_model(4, 8, -1.0, 1.0, 1.0, 1.0), Part::System)
            .ground_degeneracy() == 1);
}

TEST_CASE("eigenpairs satisfy H V = V E and are orthonormal") {
  for (const SpinModel& m : {build_ring_model(3, 5, -1.0, 1, 2, 0.8),
                             build_chain_model(4, 4, 1.0, 1.0, 1.0, 1.0)}) {
    const Eigen::MatrixXd h = BondOperator::compile(m, Part::Full).to_dense();
    const SpectrumSummary s = diagonalize(m, Part::Full, true);
    REQUIRE(s.eigenvectors);
    const Eigen::MatrixXd& v = *s.eigenvectors;
    for (Eigen::Index k = 1; k < s.eigenvalues.size(); ++k) {
      CHECK(s.eigenvalues(k) >= s.eigenvalues(k - 1));
    }
    CHECK((h * v - v * s.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() < 1e-10 * s.width());
    const Eigen::Index n = v.cols();
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("degenerate blocks are canonical") {
  // Two solver runs on differently ordered but equal matrices must agree,
  // including inside the five-fold ground multiplet.
  SpinModel a = build_chain_model(4, 1, 1.0, 1.0, 1.0, 0.0);
  SpinModel b = a;
  std::reverse(b.system_bonds.begin(), b.system_bonds.end());
  const SpectrumSummary sa = diagonalize(a, Part::System, true);
  const Eigen::MatrixXd hb = BondOperator::compile(b, Part::System, Space::Local).to_dense();
  const SpectrumSummary sb = diagonalize_matrix(hb, true);
  CHECK((*sa.eigenvectors - *sb.eigenvectors).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("size cap") {
  const SpinModel m = build_chain_model(6, 6, 1, 1, 1, 1);
  CHECK_THROWS_AS(diagonalize(m, Part::Full, false, 1024), SizeError);
  CHECK_NOTHROW(diagonalize(m, Part::System, false, 1024));
}

TEST_CASE("two-level thermodynamics") {
  const ThermoFunctions t({0.0, 1.0}, 1e-12);
  CHECK(t.z(0.0) == 2.0);
  CHECK(t.energy(0.0) == doctest::Approx(0.5));
  CHECK(t.heat_capacity(0.0) == 0.0);
  CHECK(t.free_energy(0.0) == -std::numeric_limits<double>::infinity());
  const double beta = 0.7;
  CHECK(t.z(beta) == doctest::Approx(1.0 + std::exp(-beta)).epsilon(1e-15));
  CHECK(t.energy(beta) == doctest::Approx(std::exp(-beta) / (1.0 + std::exp(-beta))).epsilon(1e-14));
  CHECK(ThermoFunctions({3.0}, 0.0).free_energy(0.0) == 3.0);
}

TEST_CASE("low-temperature free energy") {
  const ThermoFunctions t({-1.0, -1.0, 0.0, 2.0}, 1e-12);
  CHECK(t.ground_degeneracy() == 2);
  CHECK(std::abs(t.free_energy(50.0) - (-1.0 - std::log(2.0) / 50.0)) < 1e-8);
}

TEST_CASE("Boltzmann sums factorize for the uncoupled entirety") {
  const SpinModel m = build_ring_model(3, 6, -1.0, 4, 5, 0.0);
  const ThermoFunctions full(diagonalize(m, Part::Full));
  const ThermoFunctions s(diagonalize(m, Part::System));
  const ThermoFunctions e(diagonalize(m, Part::Environment));
  for (double beta : {0.0, 0.3, 1.0, 5.0, 40.0}) {
    CHECK(full.log_z(beta) == doctest::Approx(s.log_z(beta) + e.log_z(beta)).epsilon(1e-12));
    CHECK(full.heat_capacity(beta) >= -1e-12);
  }
  CHECK(full.z(0.0) == doctest::Approx(static_cast<double>(m.dim())));
}

TEST_CASE("d ln Z / d beta = -U") {
  const ThermoFunctions t(diagonalize(build_chain_model(4, 8, 1, 1, 1, 0), Part::Environment));
  for (double beta : {0.1, 1.0, 3.0, 10.0}) {
    const double h = 1e-5 * std::max(1.0, beta);
    const double fd = (t.log_z(beta + h) - t.log_z(beta - h)) / (2 * h);
    CHECK(fd == doctest::Approx(-t.energy(beta)).epsilon(1e-6));
  }
}

TEST_CASE("z_ratio matches direct summation") {
  const SpectrumSummary env_spectrum = diagonalize(build_chain_model(4, 8, 1, 1, 1, 0), Part::Environment);
  const ThermoFunctions t(env_spectrum);
  for (double beta : {0.05, 0.5, 2.0}) {
    double z1 = 0;
    for (double e : env_spectrum.eigenvalues) z1 += std::exp(-beta * e);
    for (int n = 1; n <= 3; ++n) {
      double zn = 0;
      for (double e : env_spectrum.eigenvalues) zn += std::exp(-n * beta * e);
      CHECK(t.z_ratio(n, beta) == doctest::Approx(zn / std::pow(z1, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ground states") {
  const SpinModel ferro = build_chain_model(3, 3, 1.0, 1.0, 1.0, 1.0);
  const StateVector g = ground_state(ferro);
  const SpectrumSummary s = diagonalize(ferro, Part::Full);
  const CVector hg = apply_hamiltonian(ferro, Part::Full, g.amplitudes());
  double e = 0;
  for (std::uint64_t k = 0; k < g.dim(); ++k) e += std::real(std::conj(g[k]) * hg[k]);
  CHECK(std::abs(e - s.eigenvalues(0)) < 1e-10);

  // Antiferromagnetic pairs have a non-degenerate singlet ground state.
  const SpinModel afm = build_chain_model(2, 2, -1.0, -1.0, 1.0, 0.0);
  const StateVector prod = ground_state(afm);
  const SpectrumSummary ss = diagonalize(afm, Part::System, true);
  const SpectrumSummary se = diagonalize(afm, Part::Environment, true);
  REQUIRE(ss.ground_degeneracy() == 1);
  REQUIRE(se.ground_degeneracy() == 1);
  cplx overlap = 0;
  for (std::uint64_t k = 0; k < prod.dim(); ++k) {
    overlap += (*ss.eigenvectors)(k % 4, 0) * (*se.eigenvectors)(k / 4, 0) * prod[k];
  }
  CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-10);
}

TEST_CASE("spectrum CSV") {
  std::ostringstream out;
  write_spectrum_csv(out, diagonalize(heisenberg_pair(1.0), Part::System));
  CHECK(out.str() == "index,eigenvalue\n0,-0.25\n1,-0.25\n2,-0.25\n3,0.75\n");
}
