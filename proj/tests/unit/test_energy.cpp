#include <doctest.h>

#include <cmath>

#include "droplab/energy.hpp"
#include "droplab/errors.hpp"
#include "droplab/isoperimetry.hpp"

using namespace droplab;

namespace {
EnergyParams params(int n, double a = 0.0) {
  EnergyParams p;
  p.kernel.dimension = n;
  p.A = a;
  return p;
}

QuadratureSpec tensor() {
  QuadratureSpec q;
  q.method = QuadratureMethod::tensor_midpoint;
  return q;
}
}  // namespace

TEST_SUITE("energy") {
  TEST_CASE("empty shape has zero energy") {
    for (int n : {2, 3}) {
      const auto r = total_energy(Shape::empty(n), params(n, 1.0), QuadratureSpec{});
      CHECK(r.total == 0.0);
      CHECK(r.total_error == 0.0);
    }
  }

  TEST_CASE("total is assembled term by term") {
    const auto r = total_energy(Shape(ball_of_volume(3, 2.0)), params(3, 0.7), tensor());
    CHECK(r.total == doctest::Approx(r.perimeter.value + r.riesz.value - 0.7 * r.background.value));
    CHECK(r.total_error >= r.perimeter.error);
  }

  TEST_CASE("parameter validation") {
    auto p = params(2);
    p.A = -1.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = params(3);
    p.alpha = 3.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = params(2);
    p.beta = 3.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
  }

  TEST_CASE("interaction needs disjoint sets") {
    const Shape a(BallConfig(2, {Ball{Vec(), 1.0}}));
    const Shape b(BallConfig(2, {Ball{Vec(1.0, 0.0), 1.0}}));
    CHECK_THROWS_AS(interaction(a, b, PairWeight::riesz(1.0), tensor()), PreconditionError);
  }

  TEST_CASE("union identities on a voxel pair are exact on the lattice") {
    const Kernel k(params(2).kernel);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto [u, w] = random_voxel_pair(2, 32, seed);
      const auto rp = check_perimeter_decomposition(Shape(u), Shape(w), k, tensor());
      CHECK(std::abs(rp.residual) <= 3 * rp.error + 1e-9);
      const auto rr = check_riesz_decomposition(Shape(u), Shape(w), tensor());
      CHECK(std::abs(rr.residual) <= 3 * rr.error + 1e-9);
    }
  }

  TEST_CASE("union identities under monte carlo") {
    const Kernel k(params(2).kernel);
    QuadratureSpec mc;
    mc.budget = 20000;
    const auto [u, w] = random_voxel_pair(2, 32, 7);
    const auto rp = check_perimeter_decomposition(Shape(u), Shape(w), k, mc);
    CHECK(std::abs(rp.residual) <= 3 * rp.error);
    CHECK(rp.terms.size() == 4);
  }

  TEST_CASE("ball scaling exponents") {
    for (int n : {2, 3}) {
      const auto r = scaling_report(Shape(ball_of_volume(n, 1.0)), 2.0, params(n, 1.0), tensor());
      CHECK(r.perimeter_exponent == doctest::Approx(n - 0.5).epsilon(1e-9));
      CHECK(r.riesz_exponent == doctest::Approx(2 * n - 1.0).epsilon(1e-9));
      CHECK(r.background_exponent == doctest::Approx(n - 1.0).epsilon(1e-9));
      CHECK(r.perimeter_exact);
    }
  }

  TEST_CASE("truncated kernel is not homogeneous") {
    auto p = params(2);
    p.kernel.kind = KernelKind::truncated_fractional;
    p.kernel.cap = 2.0;
    const auto r = scaling_report(Shape(ball_of_volume(2, 1.0)), 2.0, p, tensor());
    CHECK_FALSE(r.perimeter_exact);
  }
}

TEST_SUITE("energy") {
  TEST_CASE("translation changes only the background") {
    QuadratureSpec mc;
    mc.budget = 20000;
    mc.exact_balls = false;
    const Shape e(BallConfig(2, {Ball{Vec(0.2, 0.0), 0.8}, Ball{Vec(-0.9, 0.4), 0.5}}, false));
    const Shape f = translate(e, Vec(3.0, -1.0));
    const Kernel k(params(2).kernel);
    const auto pe = perimeter(e, k, mc), pf = perimeter(f, k, mc.with_stream(1));
    CHECK(std::abs(pe.value - pf.value) <= 3 * std::hypot(pe.error, pf.error));
    const auto ve = riesz(e, 1.0, mc), vf = riesz(f, 1.0, mc.with_stream(2));
    CHECK(std::abs(ve.value - vf.value) <= 3 * std::hypot(ve.error, vf.error));
    // a ball moved away from the origin sees a strictly smaller background
    const Shape b(ball_of_volume(3, 1.0));
    CHECK(background(translate(b, Vec(2.0, 0.0, 0.0)), 1.0, tensor()).value < background(b, 1.0, tensor()).value);
  }

  TEST_CASE("terms are positive on sets of positive volume") {
    QuadratureSpec mc;
    mc.budget = 5000;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Shape blob(random_blob(2, seed, 10.0));
      CHECK(perimeter(blob, Kernel(params(2).kernel), mc).value > 0.0);
      CHECK(riesz(blob, 1.0, mc).value > 0.0);
    }
  }

  TEST_CASE("energy examples") {
    const auto q = tensor();
    const auto r = total_energy(Shape(ball_of_volume(3, 4 * M_PI / 3)), params(3), q);
    CHECK(r.total == doctest::Approx(r.perimeter.value + r.riesz.value));
    CHECK(r.riesz.value == doctest::Approx(16 * M_PI * M_PI / 15).epsilon(0.01));
    const auto p1 = params(3, 1.0);
    const Shape ball10(ball_of_volume(3, 10.0));
    const auto t = total_energy(ball10, p1, q);
    const double sum = perimeter(ball10, p1, q).value + riesz(ball10, 1.0, q).value - background(ball10, 1.0, q).value;
    CHECK(t.total == doctest::Approx(sum).epsilon(1e-14));
    // off-centre ball: only the background term moves
    const auto moved = total_energy(translate(ball10, Vec(5.0, 0.0, 0.0)), p1, q);
    CHECK(moved.perimeter.value == doctest::Approx(t.perimeter.value).epsilon(1e-12));
    CHECK(moved.riesz.value == doctest::Approx(t.riesz.value).epsilon(1e-12));
    CHECK(moved.total > t.total);
    CHECK(background(ball10, 0.0, q).value == doctest::Approx(10.0).epsilon(1e-12));
  }

  TEST_CASE("riesz scaling ratio") {
    const Shape b(ball_of_volume(3, 1.0));
    const double ratio = riesz(scale(b, 2.0).shape, 1.0, tensor()).value / riesz(b, 1.0, tensor()).value;
    CHECK(ratio == doctest::Approx(32.0).epsilon(1e-10));
    const auto same = scaling_report(b, 1.0 + 1e-9, params(3, 1.0), tensor());
    CHECK(same.dilated.total == doctest::Approx(same.base.total).epsilon(1e-6));
  }

  TEST_CASE("interaction examples") {
    const Shape u(ball_of_volume(3, 1.0));
    const Shape w = translate(Shape(ball_of_volume(3, 1.0)), Vec(10.0, 0.0, 0.0));
    const auto i = interaction(u, w, PairWeight::riesz(1.0), tensor());
    CHECK(i.value <= 2.0 / 10.0);
    CHECK(i.value == doctest::Approx(0.1).epsilon(0.1));
    CHECK(interaction(u, Shape::empty(3), PairWeight::riesz(1.0), tensor()).value == 0.0);
  }

  TEST_CASE("decomposition examples") {
    const Kernel k(params(2).kernel);
    const Shape u(BallConfig(2, {Ball{Vec(), 1.0}}));
    const Shape w(BallConfig(2, {Ball{Vec(2.5, 0.0), 0.8}}));
    QuadratureSpec mc;
    mc.budget = 20000;
    const auto r = check_perimeter_decomposition(u, w, k, mc);
    CHECK(std::abs(r.residual) <= 3 * r.error);
    CHECK(check_perimeter_decomposition(u, Shape::empty(2), k, mc).residual == 0.0);
    CHECK(check_riesz_decomposition(Shape::empty(2), w, mc).residual == 0.0);
    const Shape far(BallConfig(2, {Ball{Vec(40.0, 0.0), 0.8}}));
    const auto rv = check_riesz_decomposition(u, far, mc);
    CHECK(std::abs(rv.residual) <= 3 * rv.error);
  }
}
