#include <doctest.h>

#include <cmath>

#include "droplab/constants.hpp"
#include "droplab/errors.hpp"
#include "droplab/kernels.hpp"
#include "droplab/thresholds.hpp"

using namespace droplab;

TEST_SUITE("thresholds") {
  TEST_CASE("critical mass of the worked example") {
    const auto r = critical_mass(3, 0.5, 0.5, 0.0);
    CHECK(r.mass == doctest::Approx(224.49).epsilon(0.01 / 224.49));
    CHECK(r.mass == doctest::Approx(224.4956993896896).epsilon(1e-13));
    CHECK(r.kind == "closed-form");
    CHECK(r.constants.c1 == doctest::Approx(0.5 - std::pow(1.5, -2.5)).epsilon(1e-15));
    CHECK(r.constants.c2 == doctest::Approx(4 * M_PI * std::sqrt(1.5) / 0.5).epsilon(1e-15));
  }

  TEST_CASE("critical mass with background") {
    CHECK(critical_mass(2, 0.5, 1.0, 2.0).mass == doctest::Approx(135.00846371746294).epsilon(1e-13));
  }

  TEST_CASE("conventions differ only in the prefactor exponent") {
    const auto t = critical_mass(3, 0.5, 0.5, 0.0, Convention::theorem);
    const auto a = critical_mass(3, 0.5, 0.5, 0.0, Convention::appendix);
    CHECK(a.constants.c2 == t.constants.c2);
    CHECK(a.mass == doctest::Approx(119.27224849905065).epsilon(1e-12));
    CHECK(convention_from_string(to_string(Convention::appendix)) == Convention::appendix);
  }

  TEST_CASE("degenerate prefactor is rejected") {
    // 1 + eps = 2^{1/(N+s-1)} makes C1 vanish.
    const double eps = std::pow(2.0, 1.0 / 2.5) - 1.0;
    CHECK_THROWS_AS(critical_mass(3, 0.5, eps, 0.0), ParameterError);
    CHECK_THROWS_AS(critical_mass(3, 1.2, 0.5, 0.0), ParameterError);
  }

  TEST_CASE("root finder reduces to the closed form at beta = 1") {
    for (double a : {0.0, 0.5, 3.0}) {
      const auto c = critical_mass(3, 0.5, 0.5, a);
      const auto r = general_critical_mass(3, 0.5, 0.5, a, 1.0);
      CHECK(r.kind == "root");
      CHECK(std::abs(r.mass - c.mass) <= 1e-12 * c.mass);
      CHECK(std::abs(r.residual) <= 1e-10 * r.residual_scale);
      CHECK(r.phi_at_2m > 0.0);
      CHECK(r.phi_at_10m > 0.0);
    }
  }

  TEST_CASE("general roots match the oracle and ignore the bracket start") {
    CHECK(general_critical_mass(3, 0.5, 0.5, 2.0, 0.0).mass == doctest::Approx(268.26528318309926).epsilon(1e-11));
    CHECK(general_critical_mass(3, 0.5, 0.5, 2.0, 0.0, Convention::theorem, {1e-5, 10.0}).mass ==
          doctest::Approx(268.26528318309926).epsilon(1e-11));
    CHECK(general_critical_mass(2, 0.5, 1.0, 1.0, 2.5).mass == doctest::Approx(123.09566776745433).epsilon(1e-11));
  }

  TEST_CASE("phi domain") {
    const auto c = general_constants(2, 0.5, 1.0, 1.0, Convention::theorem);
    CHECK(c.c3 == 1.0);
    CHECK(c.p == 0.0);
    CHECK_THROWS_AS(phi(0.0, c, 1.0), DomainError);
    CHECK_THROWS_AS(general_constants(2, 0.5, 1.0, 3.0, Convention::theorem), ParameterError);
  }
}

TEST_SUITE("thresholds") {
  TEST_CASE("critical mass is affine in A") {
    const auto base = critical_mass(3, 0.5, 0.5, 0.0);
    const double slope = 1.0 / base.constants.c1;
    CHECK(slope == doctest::Approx(7.2932).epsilon(1e-4));
    CHECK(critical_mass(3, 0.5, 0.5, 10.0).mass - base.mass == doctest::Approx(72.932).epsilon(1e-4));
    for (double a : {0.5, 2.0, 7.0}) CHECK(critical_mass(3, 0.5, 0.5, a).mass == doctest::Approx(base.mass + slope * a).epsilon(1e-13));
    CHECK(base.constants.c1 == doctest::Approx(0.137115).epsilon(1e-5));
  }

  TEST_CASE("epsilon at the minimum is rejected") {
    CHECK_THROWS_AS(critical_mass(2, 0.5, epsilon_min(2, 0.5), 0.0), ParameterError);
  }

  TEST_CASE("appendix constants") {
    const auto c = general_constants(3, 0.5, 0.5, 0.0, Convention::theorem);
    CHECK(c.p == doctest::Approx(-1.0 / 3.0));
    CHECK(c.c3 == doctest::Approx(4 * M_PI * std::pow(4 * M_PI / 3, -4.0 / 3.0) / 4.0).epsilon(1e-14));
    for (int n : {2, 3}) CHECK(general_constants(n, 0.5, 1.0, 1.0, Convention::theorem).c3 == 1.0);
  }

  TEST_CASE("phi profile") {
    const auto c = general_constants(3, 0.5, 0.5, 1.0, Convention::theorem);
    CHECK(phi((c.c2 + 2.0 * c.c3) / c.c1, c, 2.0) == doctest::Approx(0.0).epsilon(1e-12).scale(c.c2));
    const auto cp = general_constants(2, 0.5, 1.0, 2.5, Convention::theorem);
    CHECK(phi(1e-12, cp, 1.5) == doctest::Approx(-1.5 * cp.c3).epsilon(1e-5));
    CHECK(phi(1e9, cp, 1.5) > 0.0);
  }

  TEST_CASE("roots in special cases") {
    const auto r0 = general_critical_mass(2, 0.5, 1.0, 0.0, 2.5);
    CHECK(r0.mass == doctest::Approx(r0.constants.c2 / r0.constants.c1).epsilon(1e-11));
    const auto r = general_critical_mass(3, 0.5, 0.5, 1.0, 0.0);
    CHECK(std::abs(r.residual) <= 1e-10 * r.residual_scale);
    CHECK(phi(2 * r.mass, r.constants, 1.0) > 0.0);
    // independent grid scan: phi changes sign once, next to the root
    double prev = phi(1e-3, r.constants, 1.0);
    int changes = 0;
    double where = 0.0;
    for (double x = 1e-3; x < 1e5; x *= 1.01) {
      const double v = phi(x, r.constants, 1.0);
      if ((v > 0) != (prev > 0)) {
        ++changes;
        where = x;
      }
      prev = v;
    }
    CHECK(changes == 1);
    CHECK(where == doctest::Approx(r.mass).epsilon(0.011));
  }

  TEST_CASE("dimension constants") {
    for (int n : {2, 3}) CHECK(ball_volume(n) == doctest::Approx(sphere_area(n) / n).epsilon(1e-15));
  }
}
