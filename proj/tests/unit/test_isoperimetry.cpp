#include <doctest.h>

#include <cmath>

#include "droplab/errors.hpp"
#include "droplab/isoperimetry.hpp"

using namespace droplab;

TEST_SUITE("isoperimetry") {
  TEST_CASE("constant and cap") {
    CHECK(isoperimetric_constant(2, 0.5, 1.0) == doctest::Approx(2 * M_PI * std::pow(M_PI, 0.25) / 0.5));
    CHECK(isoperimetric_constant(3, 0.5, 2.0) ==
          doctest::Approx(4 * M_PI * std::pow(4 * M_PI / 3, 0.5 / 3) / 1.0));
    CHECK(isoperimetric_volume_cap(3, 1.0) == doctest::Approx(8 * 4 * M_PI / 3));
  }

  TEST_CASE("ball at the cap satisfies the bound") {
    for (int n : {2, 3}) {
      KernelSpec ks;
      ks.dimension = n;
      QuadratureSpec q;
      const double cap = isoperimetric_volume_cap(n, ks.epsilon);
      const auto c = isoperimetric_check(Shape(ball_of_volume(n, cap)), ks, q);
      CHECK(c.slack > 0.0);
      CHECK_THROWS_AS(isoperimetric_check(Shape(ball_of_volume(n, 1.01 * cap)), ks, q), PreconditionError);
    }
  }

  TEST_CASE("random blobs stay under the cap and satisfy the bound") {
    KernelSpec ks;
    QuadratureSpec q;
    q.method = QuadratureMethod::tensor_midpoint;
    const double cap = isoperimetric_volume_cap(2, 1.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto blob = random_blob(2, seed, cap);
      CHECK(blob.volume() <= cap);
      const auto c = isoperimetric_check(Shape(blob), ks, q);
      CHECK(c.slack >= -3 * c.error);
    }
  }

  TEST_CASE("random voxel pairs are disjoint and seeded") {
    const auto [u, w] = random_voxel_pair(2, 32, 4);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK_FALSE((u.at_index(i) && w.at_index(i)));
    const auto [u2, w2] = random_voxel_pair(2, 32, 4);
    CHECK(u.cells() == u2.cells());
    CHECK(w.cells() == w2.cells());
  }
}

TEST_SUITE("isoperimetry") {
  TEST_CASE("empty set") {
    const auto c = isoperimetric_check(Shape::empty(2), KernelSpec{}, QuadratureSpec{});
    CHECK(c.bound == 0.0);
    CHECK(c.perimeter.value == 0.0);
    CHECK(c.slack == 0.0);
  }

  TEST_CASE("constant decreases with the sandwich constant") {
    for (int n : {2, 3}) {
      CHECK(isoperimetric_constant(n, 0.5, 2.0) < isoperimetric_constant(n, 0.5, 1.0));
      CHECK(isoperimetric_constant(n, 0.5, 5.0) < isoperimetric_constant(n, 0.5, 2.0));
    }
  }

  TEST_CASE("slack sign is scale invariant") {
    KernelSpec ks;
    QuadratureSpec q;
    q.method = QuadratureMethod::tensor_midpoint;
    const double cap = isoperimetric_volume_cap(2, 1.0);
    // integer factors keep voxel sets exact
    const auto blob = random_blob(2, 21, cap / 4);
    const auto small = isoperimetric_check(Shape(blob), ks, q);
    const auto scaled = scale(Shape(blob), 2.0);
    REQUIRE(scaled.resampling_error == 0.0);
    const auto big = isoperimetric_check(scaled.shape, ks, q);
    CHECK((big.slack > 0) == (small.slack > 0));
    // both sides scale like lambda^{N - s}
    CHECK(big.slack / small.slack == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-6));
  }
}
