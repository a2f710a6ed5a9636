#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qkr/units.hpp"

using namespace qkr;

TEST_CASE("Rb-87 at 780 nm reproduces the known Talbot time") {
  const PhysicalContext ctx = make_context_amu(kRb87MassU, 780e-9);
  // T_T = pi/(2 omega_R) = pi m lambda^2 / (4 pi^2 hbar) ~ 66.3 us
  CHECK(ctx.talbot_time * 1e6 == doctest::Approx(66.3).epsilon(2e-3));
  // Half and three-halves periods used in the figure captions
  CHECK(0.5 * ctx.talbot_time * 1e6 == doctest::Approx(33.15).epsilon(2e-3));
  CHECK(1.5 * ctx.talbot_time * 1e6 == doctest::Approx(99.45).epsilon(2e-3));
}

TEST_CASE("talbot_time * recoil_frequency is pi/2 by construction") {
  const PhysicalContext ctx = make_context_amu(kRb87MassU, 780e-9);
  CHECK(ctx.talbot_time * ctx.recoil_frequency ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
}

TEST_CASE("all derived constants are positive") {
  const PhysicalContext ctx = make_context_amu(kRb87MassU, 780e-9);
  CHECK(ctx.k_laser > 0.0);
  CHECK(ctx.recoil_frequency > 0.0);
  CHECK(ctx.talbot_time > 0.0);
  CHECK(ctx.recoil_momentum > 0.0);
  CHECK(ctx.recoil_energy > 0.0);
}

TEST_CASE("Talbot time scales linearly with mass") {
  const PhysicalContext rb = make_context_amu(kRb87MassU, 780e-9);
  const PhysicalContext heavy = make_context_amu(2.0 * kRb87MassU, 780e-9);
  CHECK(heavy.talbot_time ==
        doctest::Approx(2.0 * rb.talbot_time).epsilon(1e-12));
}

TEST_CASE("non-positive inputs are rejected") {
  CHECK_THROWS_AS(make_context(0.0, 780e-9), std::invalid_argument);
  CHECK_THROWS_AS(make_context(-1e-25, 780e-9), std::invalid_argument);
  CHECK_THROWS_AS(make_context(1e-25, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_context(1e-25, -780e-9), std::invalid_argument);
}

TEST_CASE("period classification: l = 2T/T_T with integer flag") {
  const PhysicalContext ctx = make_context_amu(kRb87MassU, 780e-9);

  SUBCASE("33.15 us is close to l = 1") {
    const auto d = to_dimensionless(33.15e-6, 2, 1.0, 0.0, ctx);
    CHECK(d.l_real == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(d.l_is_integer);
    CHECK(d.l_nearest == 1);
  }
  SUBCASE("exactly one Talbot time gives l = 2") {
    const auto d = to_dimensionless(ctx.talbot_time, 2, 1.0, 0.0, ctx);
    CHECK(d.l_real == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d.l_is_integer);
    CHECK(d.l_nearest == 2);
  }
  SUBCASE("0.7 Talbot times gives l = 1.4 and no integer flag") {
    const auto d = to_dimensionless(0.7 * ctx.talbot_time, 2, 1.0, 0.0, ctx);
    CHECK(d.l_real == doctest::Approx(1.4).epsilon(1e-12));
    CHECK_FALSE(d.l_is_integer);
  }
  SUBCASE("two Talbot times gives l = 4") {
    const auto d = to_dimensionless(2.0 * ctx.talbot_time, 2, 1.0, 0.0, ctx);
    CHECK(d.l_real == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(d.l_nearest == 4);
  }
  SUBCASE("non-positive period is rejected") {
    CHECK_THROWS_AS(to_dimensionless(0.0, 2, 1.0, 0.0, ctx),
                    std::invalid_argument);
  }
}

TEST_CASE("unit conversions round-trip to 1e-12") {
  const PhysicalContext ctx = make_context_amu(kRb87MassU, 780e-9);
  const DimensionlessUnits u(ctx);

  for (double p : {1e-30, 3.7e-28, 5.5e-27}) {
    CHECK(u.momentum_to_si(u.momentum_to_recoils(p)) ==
          doctest::Approx(p).epsilon(1e-12));
  }
  for (double r : {0.01, 1.0, 17.3}) {
    CHECK(u.momentum_to_recoils(u.momentum_to_si(r)) ==
          doctest::Approx(r).epsilon(1e-12));
    CHECK(u.energy_to_recoils(u.energy_to_si(r)) ==
          doctest::Approx(r).epsilon(1e-12));
    CHECK(u.time_to_talbot(u.time_to_si(r)) ==
          doctest::Approx(r).epsilon(1e-12));
    CHECK(u.position_to_units(u.position_to_si(r)) ==
          doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("kinetic energy in recoil units equals squared momentum in recoils") {
  const PhysicalContext ctx = make_context_amu(kRb87MassU, 780e-9);
  const DimensionlessUnits u(ctx);
  // E = p^2/(2m) with p = q hbar k_L must give E/E_r = q^2
  for (double q : {0.5, 1.0, 3.0}) {
    const double p_si = u.momentum_to_si(q);
    const double e_si = p_si * p_si / (2.0 * ctx.atom_mass);
    CHECK(u.energy_to_recoils(e_si) == doctest::Approx(q * q).epsilon(1e-12));
  }
}
