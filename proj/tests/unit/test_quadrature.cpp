#include <doctest.h>

#include <cmath>

#include "droplab/constants.hpp"
#include "droplab/energy.hpp"
#include "droplab/errors.hpp"
#include "droplab/lattice.hpp"
#include "droplab/quadrature.hpp"
#include "droplab/radial_profile.hpp"

using namespace droplab;

// Reference values come from tests/oracles/oracles.py (direct scipy integration).
namespace {
constexpr double kBallPerimeter2 = 62.13063877890798;    // N = 2, s = 1/2
constexpr double kBallPerimeter3 = 178.6589235109361;    // N = 3, s = 1/2
constexpr double kDiskRiesz = 8.377580409572673;         // V(B1), N = 2
constexpr double kSquarePerimeter = 27.211908359984626;  // unit square, s = 1/2
constexpr double kDiskRieszCross = 3.1059596033081203;   // radii 1, 0.7, centres 1.7 apart
constexpr double kDiskKernelCross = 2.9576879355338184;  // same pair, |z|^{-5/2}

QuadratureSpec tensor() {
  QuadratureSpec q;
  q.method = QuadratureMethod::tensor_midpoint;
  return q;
}

Kernel fractional(int n) {
  KernelSpec ks;
  ks.dimension = n;
  return Kernel(ks);
}

VoxelShape unit_square(int cells) {
  VoxelShape v(2, {cells, cells, 1}, Vec(), 1.0 / cells);
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < cells; ++i) v.set(i, j, 0, true);
  return v;
}
}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("radial profile integrals") {
    const auto p = RadialProfile::power(2.0, -1.5);
    CHECK(p.integral(1.0, 4.0) == doctest::Approx(2.0 * 2.0 * (1.0 - 0.5)));
    CHECK(p.tail(1.0) == doctest::Approx(4.0));
    CHECK(p.integrable_at_infinity());
    CHECK_FALSE(p.integrable_at_zero());
    // int_0^2 int_2^3 |u - t|^{-1/2}: closed form (4/3)(3^{3/2} - 2^{3/2} - 1).
    const LineKernel lk(RadialProfile::power(1.0, -0.5));
    CHECK(lk.pair(0.0, 2.0, 2.0, 3.0) == doctest::Approx(4.0 / 3.0 * (std::pow(3.0, 1.5) - std::pow(2.0, 1.5) - 1.0)));
  }

  TEST_CASE("exact ball paths match the oracle") {
    CHECK(perimeter(Shape(ball_of_volume(2, M_PI)), fractional(2), tensor()).value ==
          doctest::Approx(kBallPerimeter2).epsilon(1e-8));
    CHECK(perimeter(Shape(ball_of_volume(3, 4 * M_PI / 3)), fractional(3), tensor()).value ==
          doctest::Approx(kBallPerimeter3).epsilon(1e-8));
    CHECK(riesz(Shape(ball_of_volume(2, M_PI)), 1.0, tensor()).value == doctest::Approx(kDiskRiesz).epsilon(1e-10));
    CHECK(riesz(Shape(ball_of_volume(3, 4 * M_PI / 3)), 1.0, tensor()).value ==
          doctest::Approx(16 * M_PI * M_PI / 15).epsilon(1e-10));
    for (int n : {2, 3})
      CHECK(background(Shape(ball_of_volume(n, ball_volume(n))), 1.0, tensor()).value ==
            doctest::Approx(2 * M_PI).epsilon(1e-10));
  }

  TEST_CASE("lattice perimeter of the unit square") {
    for (int cells : {1, 4, 16}) {
      const auto p = perimeter(Shape(unit_square(cells)), fractional(2), tensor());
      CHECK(p.value == doctest::Approx(kSquarePerimeter).epsilon(1e-7));
      CHECK(std::abs(p.value - kSquarePerimeter) <= std::max(p.error * 10, 1e-8 * kSquarePerimeter));
    }
  }

  TEST_CASE("monte carlo agrees with exact values within its error") {
    QuadratureSpec mc;
    mc.budget = 100000;
    mc.exact_balls = false;
    const auto p = perimeter(Shape(unit_square(4)), fractional(2), mc);
    CHECK(std::abs(p.value - kSquarePerimeter) < 4 * p.error);
    CHECK(p.error < 0.01 * kSquarePerimeter);
    const auto b = perimeter(Shape(ball_of_volume(3, 4 * M_PI / 3)), fractional(3), mc);
    CHECK(std::abs(b.value - kBallPerimeter3) < 4 * b.error);
    const auto v = riesz(Shape(ball_of_volume(2, M_PI)), 1.0, mc);
    CHECK(std::abs(v.value - kDiskRiesz) < 4 * v.error);
  }

  TEST_CASE("cross integrals of two touching disks") {
    const Shape u(BallConfig(2, {Ball{Vec(), 1.0}}));
    const Shape w(BallConfig(2, {Ball{Vec(1.7, 0.0), 0.7}}));
    const auto r = interaction(u, w, PairWeight::riesz(1.0), tensor());
    CHECK(r.value == doctest::Approx(kDiskRieszCross).epsilon(1e-8));
    const auto k = interaction(u, w, PairWeight::kernel(fractional(2)), tensor());
    CHECK(std::abs(k.value - kDiskKernelCross) < 3 * k.error + 1e-8);
  }

  TEST_CASE("disjoint balls in R^3 interact as point masses") {
    const Shape u(BallConfig(3, {Ball{Vec(), 1.0}}));
    const Shape w(BallConfig(3, {Ball{Vec(0.0, 3.0, 0.0), 0.5}}));
    const double m1 = 4 * M_PI / 3, m2 = m1 / 8;
    CHECK(interaction(u, w, PairWeight::riesz(1.0), tensor()).value == doctest::Approx(m1 * m2 / 3.0).epsilon(1e-9));
  }

  TEST_CASE("seeds make estimates reproducible") {
    QuadratureSpec mc;
    mc.budget = 5000;
    mc.exact_balls = false;
    const Shape b(ball_of_volume(2, 1.0));
    const auto a = perimeter(b, fractional(2), mc);
    const auto c = perimeter(b, fractional(2), mc);
    CHECK(a.value == c.value);
    CHECK(a.seed == c.seed);
    const auto d = perimeter(b, fractional(2), mc.with_stream(3));
    CHECK(d.value != a.value);
  }

  TEST_CASE("spec validation") {
    QuadratureSpec q;
    q.budget = 999;
    CHECK_THROWS_AS(q.validate(), ParameterError);
    CHECK_THROWS_AS(quadrature_method_from_string("simpson"), ParameterError);
    QuadratureSpec pair;
    pair.sampler = Sampler::pair;
    pair.exact_balls = false;
    CHECK_THROWS_AS(perimeter(Shape(ball_of_volume(2, 1.0)), fractional(2), pair), ParameterError);
  }

  TEST_CASE("sphere average") {
    const auto one = sphere_average([](const Vec&) { return 1.0; }, 3, tensor());
    CHECK(one.value == doctest::Approx(4 * M_PI).epsilon(1e-10));
  }
}

TEST_SUITE("quadrature") {
  TEST_CASE("single integrals") {
    QuadratureSpec mc;
    mc.exact_balls = false;
    const Shape b(ball_of_volume(3, 4 * M_PI / 3));
    const auto one = integral_over(b, [](const Vec&) { return 1.0; }, mc);
    CHECK(std::abs(one.value - 4 * M_PI / 3) <= 4 * one.error + 1e-12);
    const auto inv = integral_over(b, [](const Vec& x) { return 1.0 / norm(x); }, mc);
    CHECK(std::abs(inv.value - 2 * M_PI) <= 4 * inv.error + 1e-9);
    CHECK(power_integral(b, 0.0, mc).value == doctest::Approx(4 * M_PI / 3).epsilon(1e-12));
  }

  TEST_CASE("double integral examples") {
    QuadratureSpec mc;
    mc.budget = 200000;
    const Shape b(ball_of_volume(3, 4 * M_PI / 3));
    auto coulomb = [](const Vec& x, const Vec& y) { return 1.0 / norm(x - y); };
    const auto self = double_integral(b, b, coulomb, mc);
    CHECK(std::abs(self.value - 32 * M_PI * M_PI / 15) <= 4 * self.error);
    const double m = 4 * M_PI / 3;
    const Shape far(BallConfig(3, {Ball{Vec(10.0, 0.0, 0.0), 1.0}}));
    const auto cross = double_integral(b, far, coulomb, mc);
    CHECK(cross.value >= m * m / 12 - 3 * cross.error);
    CHECK(cross.value <= m * m / 8 + 3 * cross.error);
    CHECK(double_integral(b, Shape::empty(3), coulomb, mc).value == 0.0);
  }

  TEST_CASE("double integral is symmetric under swapping the sets") {
    QuadratureSpec mc;
    mc.budget = 50000;
    const Shape u(BallConfig(2, {Ball{Vec(), 1.0}}));
    const Shape w(BallConfig(2, {Ball{Vec(2.5, 0.5), 0.6}}));
    auto g = [](const Vec& x, const Vec& y) { return std::exp(-norm(x - y)) * (1.0 + x[0]); };
    auto swapped = [&](const Vec& y, const Vec& x) { return g(x, y); };
    const auto a = double_integral(u, w, g, mc);
    const auto b = double_integral(w, u, swapped, mc.with_stream(9));
    CHECK(std::abs(a.value - b.value) <= 3 * std::hypot(a.error, b.error));
  }

  TEST_CASE("monte carlo error shrinks like budget^-1/2") {
    QuadratureSpec mc;
    mc.exact_balls = false;
    mc.budget = 10000;
    const Shape b(ball_of_volume(2, 2.0));
    const auto lo = perimeter(b, fractional(2), mc);
    mc.budget = 40000;
    const auto hi = perimeter(b, fractional(2), mc);
    const double ratio = lo.error / hi.error;
    CHECK(ratio > 2.0 / 3.0);
    CHECK(ratio < 6.0);
  }

  TEST_CASE("chord monte carlo matches the ball perimeter oracle") {
    QuadratureSpec mc;
    mc.exact_balls = false;
    mc.budget = 100000;
    mc.seed = 77;
    const auto p = perimeter(Shape(ball_of_volume(2, M_PI)), fractional(2), mc);
    CHECK(std::abs(p.value - kBallPerimeter2) <= 3 * p.error);
    CHECK(perimeter(Shape::empty(2), fractional(2), mc).value == 0.0);
  }

  TEST_CASE("arc integral of the positive part") {
    const auto arc = sphere_average([](const Vec& v) { return std::max(v[0], 0.0); }, 2, tensor());
    CHECK(arc.value == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(sphere_average([](const Vec&) { return 1.0; }, 2, tensor()).value == doctest::Approx(2 * M_PI));
  }
}
