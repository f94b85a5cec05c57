#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinbath/theory.hpp"

using namespace spinbath;

namespace {

PredictionInputs two_level(double gap_s, double gap_e, double beta) {
  PredictionInputs in;
  in.thermo_s = ThermoFunctions({0.0, gap_s}, 1e-12);
  in.thermo_e = ThermoFunctions({0.0, gap_e}, 1e-12);
  in.d_s = 2;
  in.d_e = 2;
  in.beta = beta;
  return in;
}

// Z(n beta)/Z(beta)^n of {0, g}, written out by hand.
double x_two_level(double g, int n, double beta) {
  return (1.0 + std::exp(-n * beta * g)) / std::pow(1.0 + std::exp(-beta * g), n);
}

}  // namespace

TEST_CASE("infinite-temperature values") {
  const LimitPair l = infinite_temperature_scaling(2, 2);
  CHECK(l.sigma2 == doctest::Approx(0.1).epsilon(1e-15));
  const LimitPair one = infinite_temperature_scaling(1, 64);
  CHECK(one.sigma2 == 0.0);
  CHECK(one.delta2 == 0.0);
  const double ratio = infinite_temperature_scaling(16, 1 << 20).sigma2 /
                       infinite_temperature_scaling(16, 1 << 21).sigma2;
  CHECK(ratio == doctest::Approx(2.0).epsilon(1e-6));

  const PredictionInputs in = prediction_inputs(build_chain_model(4, 8, 1, 1, 1, 0), 0.0);
  const LimitPair ref = infinite_temperature_scaling(16, 256);
  CHECK(sigma2_full(in) == doctest::Approx(ref.sigma2).epsilon(1e-14));
  CHECK(sigma2_leading(in) == doctest::Approx(ref.sigma2).epsilon(1e-14));
  CHECK(delta2_full(in) == doctest::Approx(ref.delta2).epsilon(1e-14));
  CHECK(delta2_leading(in) == doctest::Approx(ref.delta2).epsilon(1e-14));
  CHECK(ref.sigma2 == doctest::Approx(15.0 / (2 * 4097)));
}

TEST_CASE("two-level spectra against hand-written partition functions") {
  const double gs = 0.8, ge = 1.7;
  for (double beta : {0.0, 0.3, 1.0, 4.0}) {
    const PredictionInputs in = two_level(gs, ge, beta);
    const double d = 4.0;
    const double xs2 = x_two_level(gs, 2, beta), xs3 = x_two_level(gs, 3, beta);
    const double xe2 = x_two_level(ge, 2, beta), xe3 = x_two_level(ge, 3, beta);
    const double s_lead = d / (2 * (d + 1)) * (1 - xs2) * xe2;
    const double s_full = xe2 * (1 - xs2) / 2 - 2 * d / (d + 1) * xe3 * (xs2 - xs3) +
                          3 * d / (2 * (d + 1)) * xe2 * xe2 * xs2 * (1 - xs2);
    const double d_lead = d / (d + 1) * xs2 * (xe2 - 1 / d);
    const double d_full = d / (d + 1) * xe2 * (xs2 - 2 * xs3 + xs2 * xs2);
    CHECK(sigma2_leading(in) == doctest::Approx(s_lead).epsilon(1e-13));
    CHECK(sigma2_full(in) == doctest::Approx(s_full).epsilon(1e-13));
    CHECK(delta2_leading(in) == doctest::Approx(d_lead).epsilon(1e-13));
    CHECK(delta2_full(in) == doctest::Approx(d_full).epsilon(1e-13));

    // Delta-b term: variance of the two-level system at 2 beta plus the
    // squared energy shift between beta and 2 beta.
    const double db = 0.2;
    const double p2 = std::exp(-2 * beta * gs) / (1 + std::exp(-2 * beta * gs));
    const double p1 = std::exp(-beta * gs) / (1 + std::exp(-beta * gs));
    const double var2 = gs * gs * p2 * (1 - p2);
    const double shift = gs * (p2 - p1);
    CHECK(delta2_full(in, db) ==
          doctest::Approx(d_full + xs2 * (var2 + shift * shift) * db * db).epsilon(1e-13));
  }
}

TEST_CASE("low-temperature limits") {
  const LimitPair l = low_temperature_limits(5, 9, 16, 256);
  CHECK(std::sqrt(l.sigma2) == doctest::Approx(0.21).epsilon(0.01));
  CHECK(l.delta2 == doctest::Approx(4.0 / 225 * 4096 / 4097).epsilon(1e-14));
  const LimitPair one = low_temperature_limits(1, 7, 16, 256);
  CHECK(one.sigma2 == 0.0);
  CHECK(one.delta2 == 0.0);
  CHECK(low_temperature_limits(1000000, 9, 1 << 20, 1 << 20).sigma2 ==
        doctest::Approx(1.0 / 18).epsilon(1e-5));
  CHECK_THROWS(low_temperature_limits(0, 1, 2, 2));

  const SpinModel m = build_chain_model(4, 8, 1, 1, 1, 0);
  const PredictionInputs deep = prediction_inputs(m, 2000.0);
  CHECK(sigma2_full(deep) == doctest::Approx(l.sigma2).epsilon(1e-10));
  CHECK(delta2_full(deep) == doctest::Approx(l.delta2).epsilon(1e-10));
}

TEST_CASE("leading and full expansions agree where the corrections are small") {
  const SpinModel m = build_chain_model(4, 8, 1, 1, 1, 0);
  for (double beta : {0.0, 0.01, 0.05}) {
    const PredictionInputs in = prediction_inputs(m, beta);
    CHECK(sigma2_leading(in) == doctest::Approx(sigma2_full(in)).epsilon(1e-3));
    CHECK(delta2_leading(in) == doctest::Approx(delta2_full(in)).epsilon(1e-3));
  }
  for (double beta : {0.1, 0.5, 1.0, 2.0}) {
    const PredictionInputs in = prediction_inputs(m, beta);
    CHECK(std::abs(sigma2_full(in) - sigma2_leading(in)) / sigma2_full(in) < 0.05);
  }
}

TEST_CASE("prediction inputs are validated") {
  PredictionInputs in = two_level(1, 1, 1);
  in.d_e = 4;
  CHECK_THROWS_AS(in.validate(), std::invalid_argument);
  in = two_level(1, 1, -1);
  CHECK_THROWS_AS(in.validate(), std::invalid_argument);
}

TEST_CASE("first-order symmetry traces vanish for spin couplings") {
  for (const SpinModel& m :
       {build_ring_model(3, 5, -1.0, 7, 8, 1.0), build_chain_model(3, 5, 1.0, 0.7, -0.4, 1.0),
        build_chain_model(2, 6, -1.0, 1.0, 1.0, 1.0)}) {
    for (double beta : {0.0, 0.5, 3.0}) {
      const SymmetryTraces t = first_order_symmetry_trace(m, beta);
      CHECK(t.relative_a < 1e-10);
      CHECK(t.relative_b < 1e-10);
    }
  }
  SpinModel broken = build_ring_model(3, 5, -1.0, 7, 8, 1.0);
  broken.coupling_offset = 0.5;
  const SymmetryTraces t0 = first_order_symmetry_trace(broken, 0.0);
  CHECK(t0.trace_a == doctest::Approx(0.5 * 256));
  const SymmetryTraces t1 = first_order_symmetry_trace(broken, 1.0);
  CHECK(t1.relative_a > 1e-3);
  CHECK(t1.relative_b > 1e-3);
  CHECK_THROWS_AS(first_order_symmetry_trace(broken, 1.0, 64), SizeError);
}

TEST_CASE("prediction curve export") {
  const auto rows = prediction_curve(build_chain_model(1, 1, 0, 0, 1, 0), {0.0, 1.0});
  REQUIRE(rows.size() == 2);
  std::ostringstream out;
  write_prediction_csv(out, rows);
  const std::string text = out.str();
  CHECK(text.rfind("beta,sigma2_leading,sigma2_full,delta2_leading,delta2_full\n0,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
