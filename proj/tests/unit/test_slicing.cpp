#include <doctest.h>

#include <cmath>

#include "droplab/energy.hpp"
#include "droplab/errors.hpp"
#include "droplab/sampling.hpp"
#include "droplab/slicing.hpp"
#include "droplab/thresholds.hpp"

using namespace droplab;

namespace {
EnergyParams params3(double a = 0.0) {
  EnergyParams p;
  p.kernel.dimension = 3;
  p.kernel.epsilon = 0.5;
  p.A = a;
  return p;
}
}  // namespace

TEST_SUITE("slicing") {
  TEST_CASE("sphere integral of the positive part") {
    QuadratureSpec q;
    q.method = QuadratureMethod::tensor_midpoint;
    Rng rng(11);
    for (int n : {2, 3})
      for (int i = 0; i < 5; ++i) {
        Vec x;
        for (int k = 0; k < n; ++k) x[k] = rng.uniform(-2.0, 2.0);
        const auto c = sphere_integral_check(x, n, q);
        CHECK(c.relative_deviation < 1e-3);
      }
    // 2|x| on the circle, pi |x| on the sphere.
    CHECK(sphere_positive_integral(Vec(3.0, 4.0), 2) == doctest::Approx(10.0));
    CHECK(sphere_positive_integral(Vec(0.0, 0.0, 2.0), 3) == doctest::Approx(2 * M_PI));
    CHECK(sphere_positive_integral_uncorrected(Vec(0.0, 0.0, 2.0), 3) == doctest::Approx(4 * M_PI));
  }

  TEST_CASE("cuts that miss the shape leave only the background term") {
    const Shape b(ball_of_volume(3, 10.0));
    QuadratureSpec q;
    q.budget = 5000;
    const auto r = splitting_defect(b, unit(0), 5.0, params3(1.0), q);
    CHECK(r.lhs.value == 0.0);
    CHECK(r.kernel_cross.value == 0.0);
    CHECK(r.defect == doctest::Approx(background(b, 1.0, q).value).epsilon(1e-12));
    CHECK(splitting_defect(b, unit(0), 5.0, params3(0.0), q).defect == 0.0);
    CHECK(r.plus_volume == 0.0);
    CHECK(r.minus_volume == doctest::Approx(10.0));
  }

  TEST_CASE("central cut sign flips across the critical mass") {
    const double mc = critical_mass(3, 0.5, 0.5, 0.0).mass;
    QuadratureSpec q;
    q.budget = 20000;
    const auto big = splitting_defect(Shape(ball_of_volume(3, 2 * mc)), unit(2), 0.0, params3(), q);
    CHECK(big.defect < -3 * big.defect_error);
    const auto small = splitting_defect(Shape(ball_of_volume(3, mc / 100)), unit(2), 0.0, params3(), q);
    CHECK(small.defect > 3 * small.defect_error);
  }

  TEST_CASE("scan grid and summaries") {
    const Shape b(ball_of_volume(2, 4.0));
    EnergyParams p;
    p.A = 0.5;
    SliceGrid g;
    g.directions = default_directions(2, 4);
    g.offset_points = 8;
    QuadratureSpec q;
    q.budget = 2000;
    const auto res = scan(b, p, g, q);
    CHECK(res.records.size() == 32);
    CHECK(res.directions.size() == 4);
    for (const auto& r : res.records) CHECK(res.records[res.min_index].defect <= r.defect);
    const auto [lo, hi] = extent(b, unit(0));
    CHECK(hi - lo == doctest::Approx(2 * radius_of_volume(2, 4.0)));
    CHECK(default_directions(3).size() == 64);
    CHECK(default_directions(2).size() == 16);
  }

  TEST_CASE("layer-cake identities on a voxel blob") {
    VoxelShape v = voxelize(Shape(BallConfig(2, {Ball{Vec(0.3, 0.1), 1.0}, Ball{Vec(1.2, 0.4), 0.6}}, false)), 0.05);
    QuadratureSpec q;
    q.budget = 20000;
    const Vec nu = Vec(0.6, 0.8);
    const auto r64 = layer_cake_checks(Shape(v), nu, q, 64);
    CHECK(std::abs(r64.residual1) <= 3 * r64.error1);
    CHECK(std::abs(r64.residual2) <= 3 * r64.error2);
    const auto r128 = layer_cake_checks(Shape(v), nu, q, 128);
    CHECK(std::abs(r128.residual1) < std::abs(r64.residual1));
    CHECK_THROWS_AS(layer_cake_checks(Shape(v), nu, q, 2), ParameterError);
  }

  TEST_CASE("averaged mass bound reproduces its closed-form terms") {
    const double mc = critical_mass(3, 0.5, 0.5, 0.0).mass;
    QuadratureSpec q;
    q.budget = 5000;
    SliceGrid g;
    g.directions = default_directions(3, 16);
    g.offset_points = 16;
    const auto r = averaged_mass_bound(Shape(ball_of_volume(3, 2 * mc)), params3(), q, g);
    CHECK(r.mass_term == doctest::Approx(r.mass_term_expected).epsilon(0.05));
    CHECK(r.sphere_constant == doctest::Approx(M_PI));
    CHECK(r.c1_m > r.c2_plus_a);
    CHECK(r.nonexistence_signature);
  }
}

TEST_SUITE("slicing") {
  TEST_CASE("sphere integral examples") {
    CHECK(sphere_positive_integral(Vec(1.0, 0.0), 2) == doctest::Approx(2.0));
    CHECK(sphere_positive_integral(Vec(0.0, 1.0, 0.0), 3) == doctest::Approx(M_PI));
    CHECK(sphere_positive_integral(Vec(), 3) == 0.0);
  }

  TEST_CASE("relabelled cut gives the same pair terms") {
    QuadratureSpec q;
    q.budget = 20000;
    const Shape b(BallConfig(3, {Ball{Vec(0.3, 0.0, 0.0), 1.2}, Ball{Vec(-1.5, 0.5, 0.0), 0.6}}));
    const Vec nu = Vec(2.0, 1.0, 2.0) * (1.0 / 3.0);
    const auto a = splitting_defect(b, nu, 0.2, params3(), q);
    const auto r = splitting_defect(b, -nu, -0.2, params3(), q.with_stream(5));
    CHECK(std::abs(a.lhs.value - r.lhs.value) <= 3 * std::hypot(a.lhs.error, r.lhs.error));
    CHECK(std::abs(a.kernel_cross.value - r.kernel_cross.value) <=
          3 * std::hypot(a.kernel_cross.error, r.kernel_cross.error));
    CHECK(a.plus_volume == doctest::Approx(r.minus_volume).epsilon(1e-9));
  }

  TEST_CASE("centred ball table is symmetric in l and has nonnegative terms") {
    QuadratureSpec q;
    q.budget = 5000;
    SliceGrid g;
    g.directions = {unit(0)};
    g.offset_points = 9;
    const auto res = scan(Shape(ball_of_volume(2, 30.0)), EnergyParams{}, g, q);
    const auto& rec = res.records;
    REQUIRE(rec.size() == 9);
    for (std::size_t i = 0; i < rec.size(); ++i) {
      const auto& x = rec[i];
      const auto& y = rec[rec.size() - 1 - i];
      CHECK(x.l == doctest::Approx(-y.l).epsilon(1e-12).scale(1.0));
      CHECK(std::abs(x.defect - y.defect) <= 3 * std::hypot(x.defect_error, y.defect_error) + 1e-12);
      CHECK(x.lhs.value >= 0.0);
      CHECK(x.kernel_cross.value >= 0.0);
      CHECK(x.background.value >= 0.0);
    }
  }

  TEST_CASE("one-point grid reproduces splitting_defect") {
    QuadratureSpec q;
    q.budget = 3000;
    const Shape b(ball_of_volume(2, 5.0));
    SliceGrid g;
    g.directions = {unit(1)};
    g.offsets = {0.25};
    const auto res = scan(b, EnergyParams{}, g, q);
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].defect == splitting_defect(b, unit(1), 0.25, EnergyParams{}, q).defect);
  }

  TEST_CASE("dumbbell just above the critical mass is cut most profitably across its neck") {
    // past about twice the critical mass a transverse cut through both balls wins instead
    EnergyParams p;
    p.kernel.epsilon = 1.0;
    const double mc = critical_mass(2, 0.5, 1.0, 0.0).mass;
    const double r = radius_of_volume(2, 0.51 * mc);
    const Shape dumbbell(BallConfig(2, {Ball{Vec(-1.02 * r, 0.0), r}, Ball{Vec(1.02 * r, 0.0), r}}));
    QuadratureSpec q;
    q.budget = 40000;
    SliceGrid g;
    g.directions = default_directions(2, 8);
    g.directions.push_back(unit(0));
    g.offset_points = 21;
    const auto res = scan(dumbbell, p, g, q);
    const auto& best = res.records[res.min_index];
    CHECK(std::abs(best.nu[0]) == doctest::Approx(1.0));
    CHECK(std::abs(best.l) < 1e-9);
    for (const auto& x : res.records)
      if (std::abs(x.nu[0]) < 0.99) CHECK(x.defect - best.defect > 3 * std::hypot(x.defect_error, best.defect_error));
  }

  TEST_CASE("layer-cake edge cases") {
    QuadratureSpec q;
    q.budget = 5000;
    const Shape upper(BallConfig(2, {Ball{Vec(0.0, 3.0), 1.0}}));
    const auto r = layer_cake_checks(upper, unit(1), q, 16);
    CHECK(r.layered_background == 0.0);
    CHECK(r.direct_background == 0.0);
  }

  TEST_CASE("averaged bound on small and empty shapes") {
    const double mc = critical_mass(3, 0.5, 0.5, 0.0).mass;
    QuadratureSpec q;
    q.budget = 5000;
    SliceGrid g;
    g.directions = default_directions(3, 16);
    g.offset_points = 16;
    const auto small = averaged_mass_bound(Shape(ball_of_volume(3, mc / 100)), params3(), q, g);
    CHECK_FALSE(small.nonexistence_signature);
    const auto none = averaged_mass_bound(Shape::empty(3), params3(), q, g);
    CHECK(none.vacuous);
    CHECK(none.averaged_lhs.value == 0.0);
    CHECK(none.averaged_kernel.value == 0.0);
    CHECK(none.averaged_defect == 0.0);
  }
}
