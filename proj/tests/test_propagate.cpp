#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "spinbath/propagate.hpp"
#include "spinbath/spectrum.hpp"

using namespace spinbath;

namespace {

Eigen::VectorXcd as_eigen(const StateVector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::uint64_t k = 0; k < s.dim(); ++k) v(k) = s[k];
  return v;
}

double max_diff(const StateVector& a, const StateVector& b) {
  double d = 0;
  for (std::uint64_t k = 0; k < a.dim(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

TEST_CASE("random states") {
  const StateVector one = random_state(1, 9);
  CHECK(std::abs(std::abs(one[0]) - 1.0) < 1e-15);
  const StateVector a = random_state(64, 123), b = random_state(64, 123), c = random_state(64, 124);
  CHECK(max_diff(a, b) == 0.0);
  CHECK(max_diff(a, c) > 0.1);
  CHECK(std::abs(a.norm() - 1.0) < 1e-14);
}

TEST_CASE("random-state moments at D = 16") {
  const int draws = 10000;
  const double d = 16;
  double s2 = 0, ss2 = 0, s4 = 0, ss4 = 0, s22 = 0, ss22 = 0;
  for (int r = 0; r < draws; ++r) {
    const StateVector v = random_state(16, 1000 + r);
    const double p0 = std::norm(v[0]), p1 = std::norm(v[1]);
    s2 += p0;
    ss2 += p0 * p0;
    s4 += p0 * p0;
    ss4 += p0 * p0 * p0 * p0;
    s22 += p0 * p1;
    ss22 += p0 * p0 * p1 * p1;
  }
  auto within = [&](double sum, double sumsq, double expect) {
    const double mean = sum / draws;
    const double se = std::sqrt((sumsq / draws - mean * mean) / (draws - 1));
    return std::abs(mean - expect) < 3 * se;
  };
  CHECK(within(s2, ss2, 1 / d));
  CHECK(within(s4, ss4, 2 / (d * (d + 1))));
  CHECK(within(s22, ss22, 1 / (d * (d + 1))));
}

TEST_CASE("Bessel sequences match the standard library") {
  for (double x : {0.0, 0.3, 1.0, 7.5, 40.0, 300.0}) {
    const int n = static_cast<int>(x) + 30;
    const auto j = bessel_j_sequence(x, n);
    const auto i = scaled_bessel_i_sequence(x, n);
    REQUIRE(j.size() == static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
      const double jref = std::cyl_bessel_j(static_cast<double>(k), x);
      const double iref = std::exp(-x) * std::cyl_bessel_i(static_cast<double>(k), x);
      CHECK(std::abs(j[k] - jref) < 1e-13);
      CHECK(std::abs(i[k] - iref) < 1e-13 * std::max(1.0, iref));
    }
  }
  // Far beyond the range where I_k(x) itself is representable.
  const auto big = scaled_bessel_i_sequence(5000.0, 100);
  CHECK(big[0] == doctest::Approx(1.0 / std::sqrt(2 * M_PI * 5000.0)).epsilon(1e-4));
}

TEST_CASE("plan invariants") {
  const EnergyBounds b{-3.0, 5.0};
  for (double arg : {0.0, 0.1, 10.0, 200.0}) {
    for (bool real : {false, true}) {
      const ChebyshevPlan p = real ? ChebyshevPlan::for_real_time(b, arg)
                                   : ChebyshevPlan::for_imaginary_time(b, arg);
      CHECK(p.order >= 1);
      CHECK(p.e_max > p.e_min);
      double largest = 0;
      for (const cplx& c : p.coefficients) largest = std::max(largest, std::abs(c));
      CHECK(std::abs(p.coefficients[p.order - 1]) <= p.tolerance * largest);
    }
  }
  CHECK_THROWS_AS(ChebyshevPlan::for_real_time(b, 1000.0, 1e-15, 50), OrderOverflowError);
  CHECK_THROWS_AS(ChebyshevPlan::for_imaginary_time(b, -1.0), std::invalid_argument);
}

TEST_CASE("thermal projection matches the dense exponential") {
  const SpinModel m = build_ring_model(2, 2, -1.0, 3, 4, 1.0);
  const Eigen::MatrixXcd h = oracle::dense(m, Part::Full);
  for (double beta : {1.0, 0.2, 8.0}) {
    ThermalStateRequest req;
    req.beta = beta;
    req.seed = 17;
    const ThermalState t = canonical_thermal_state(m, req);
    const StateVector psi0 = random_state(m.dim(), 17);
    Eigen::VectorXcd ref = oracle::dense_thermal(h, as_eigen(psi0), beta);
    ref.normalize();
    CHECK(oracle::max_diff(CVector(t.state.amplitudes().begin(), t.state.amplitudes().end()), ref) <
          1e-10);

    req.method = PropagationMethod::Exact;
    const ThermalState e = canonical_thermal_state(m, req);
    CHECK(max_diff(t.state, e.state) < 1e-10);
    CHECK(t.log_norm_factor == doctest::Approx(e.log_norm_factor).epsilon(1e-10));
  }
  ThermalStateRequest zero;
  zero.seed = 5;
  CHECK(max_diff(canonical_thermal_state(m, zero).state, random_state(m.dim(), 5)) == 0.0);
}

TEST_CASE("imaginary-time semigroup") {
  const BondOperator op = BondOperator::compile(build_ring_model(3, 5, -1.0, 1, 2, 1.0), Part::Full);
  ChebyshevPropagator p(op);
  const StateVector psi = random_state(op.dim(), 2);
  const StateVector two = p.imaginary_time(p.imaginary_time(psi, 0.7).state, 1.1).state;
  const StateVector one = p.imaginary_time(psi, 1.8).state;
  CHECK(max_diff(one, two) < 1e-9);
}

TEST_CASE("halving the tolerance moves results by less than the old tolerance") {
  const BondOperator op = BondOperator::compile(build_chain_model(4, 6, 1, 1, 1, 1), Part::Full);
  const StateVector psi = random_state(op.dim(), 3);
  ChebyshevPropagator coarse(op, 1e-8), fine(op, 5e-9);
  CHECK(max_diff(coarse.real_time(psi, 20.0), fine.real_time(psi, 20.0)) < 1e-8);
  CHECK(max_diff(coarse.imaginary_time(psi, 3.0).state, fine.imaginary_time(psi, 3.0).state) < 1e-8);
}

TEST_CASE("real-time evolution") {
  const SpinModel m = build_ring_model(3, 4, -1.0, 8, 9, 1.0);
  const StateVector psi = random_state(m.dim(), 4);
  CHECK(max_diff(evolve_real_time(m, psi, 0.0), psi) < 1e-14);

  const Eigen::MatrixXcd h = oracle::dense(m, Part::Full);
  for (double t : {0.5, 7.0, 60.0}) {
    const StateVector out = evolve_real_time(m, psi, t);
    const Eigen::VectorXcd ref = oracle::dense_evolve(h, as_eigen(psi), t);
    CHECK(oracle::max_diff(CVector(out.amplitudes().begin(), out.amplitudes().end()), ref) < 1e-10);
  }

  // -Jz Sz Sz on two spins: |uu> and |dd> gain e^{i t Jz/4}, |ud> and |du>
  // gain e^{-i t Jz/4}.
  SpinModel pair;
  pair.n_system = 2;
  pair.system_bonds = {{0, 1, 0.0, 0.0, 1.3}};
  const StateVector s(CVector{{0.5, 0}, {0, 0.5}, {-0.5, 0}, {0.5, 0.0}});
  const double t = 2.9;
  const StateVector out = evolve_real_time(pair, s, t);
  const cplx same = std::exp(cplx(0, t * 1.3 / 4)), diff = std::exp(cplx(0, -t * 1.3 / 4));
  CHECK(std::abs(out[0] - s[0] * same) < 1e-13);
  CHECK(std::abs(out[1] - s[1] * diff) < 1e-13);
  CHECK(std::abs(out[2] - s[2] * diff) < 1e-13);
  CHECK(std::abs(out[3] - s[3] * same) < 1e-13);
}

TEST_CASE("unitarity at N = 12") {
  const SpinModel m = build_ring_model(4, 8, -1.0, 1, 2, 1.0);
  const StateVector out = evolve_real_time(m, random_state(m.dim(), 6), 100.0);
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);
}

TEST_CASE("thermal expectation values of H approach the canonical average") {
  const SpinModel m = build_ring_model(3, 7, -1.0, 5, 6, 1.0);
  const ThermoFunctions exact(diagonalize(m, Part::Full));
  const BondOperator op = BondOperator::compile(m, Part::Full);
  const double beta = 1.0;
  ChebyshevPropagator p(op);
  const int n = 40;
  double sum = 0, sumsq = 0;
  for (int r = 0; r < n; ++r) {
    const StateVector s = p.imaginary_time(random_state(op.dim(), 300 + r), beta).state;
    CVector hs(op.dim());
    op.apply(s.amplitudes(), hs);
    double e = 0;
    for (std::uint64_t k = 0; k < s.dim(); ++k) e += std::real(std::conj(s[k]) * hs[k]);
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / n;
  const double spread = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::abs(mean - exact.energy(beta)) < 5 * spread / std::sqrt(n - 1.0));
  MESSAGE("<H> spread across states " << spread << " at D = " << m.dim());
}

TEST_CASE("normalization diagnostic") {
  const SpinModel m = build_chain_model(2, 4, 1, 1, 1, 0);
  for (double v : normalization_diagnostic(m, 0.0, 5, 1)) CHECK(v < 1e-16);
  const auto a = normalization_diagnostic(m, 1.0, 3, 77);
  const auto b = normalization_diagnostic(m, 1.0, 3, 77);
  CHECK(a == b);
  CHECK(a[0] > 0.0);
  CHECK_THROWS_AS(normalization_diagnostic(build_chain_model(2, 4, 1, 1, 1, 0.5), 1.0, 1, 1),
                  ConfigError);
}
