#include <doctest.h>

#include <cmath>
#include <sstream>

#include "droplab/constants.hpp"
#include "droplab/errors.hpp"
#include "droplab/geometry.hpp"
#include "droplab/sampling.hpp"

using namespace droplab;

TEST_SUITE("geometry") {
  TEST_CASE("dimension constants") {
    CHECK(sphere_area(2) == doctest::Approx(2 * M_PI));
    CHECK(sphere_area(3) == doctest::Approx(4 * M_PI));
    CHECK(ball_volume(3) == doctest::Approx(4 * M_PI / 3));
    CHECK(equator_area(2) == doctest::Approx(2.0));
    CHECK(equator_area(3) == doctest::Approx(2 * M_PI));
  }

  TEST_CASE("ball of given volume") {
    for (int n : {2, 3}) {
      const Shape b(ball_of_volume(n, 5.0));
      CHECK(volume(b) == doctest::Approx(5.0).epsilon(1e-14));
      CHECK(radius_of_volume(n, ball_volume(n)) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("lens and cap volumes") {
    // Two unit disks at distance 1: 2 pi / 3 - sqrt(3) / 2.
    CHECK(lens_volume(2, 1.0, 1.0, 1.0) == doctest::Approx(2 * M_PI / 3 - std::sqrt(3.0) / 2).epsilon(1e-13));
    // Two unit balls at distance 1: 5 pi / 12.
    CHECK(lens_volume(3, 1.0, 1.0, 1.0) == doctest::Approx(5 * M_PI / 12).epsilon(1e-13));
    CHECK(lens_volume(3, 1.0, 0.5, 2.0) == 0.0);
    CHECK(cap_volume(3, 1.0, 1.0) == doctest::Approx(2 * M_PI / 3));
    CHECK(cap_volume(2, 1.0, 1.0) == doctest::Approx(M_PI / 2));
  }

  TEST_CASE("slices partition the volume") {
    const Shape b(ball_of_volume(3, 2.0));
    const Vec nu = Vec(1.0, 2.0, 2.0) * (1.0 / 3.0);
    for (double l : {-0.5, 0.0, 0.3}) {
      const auto [plus, minus] = slice(b, Halfspace(nu, l));
      CHECK(volume(plus) + volume(minus) == doctest::Approx(2.0).epsilon(1e-12));
      const double r = radius_of_volume(3, 2.0);
      CHECK(volume(plus) == doctest::Approx(cap_volume(3, r, r - l)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(Halfspace(Vec(1.0, 1.0), 0.0), ParameterError);
  }

  TEST_CASE("voxelization converges to the ball volume") {
    const Shape b(ball_of_volume(2, M_PI));
    const double coarse = std::abs(voxelize(b, 0.1).volume() - M_PI);
    const double fine = std::abs(voxelize(b, 0.025).volume() - M_PI);
    CHECK(fine < 0.01);
    CHECK(fine < coarse);
  }

  TEST_CASE("translation and scaling") {
    const Shape b(ball_of_volume(3, 1.0));
    CHECK(volume(translate(b, Vec(3.0, 0.0, 1.0))) == doctest::Approx(1.0));
    CHECK(volume(scale(b, 2.0).shape) == doctest::Approx(8.0));
    VoxelShape v(2, {4, 4, 1}, Vec(), 0.5);
    v.set(1, 1, 0, true);
    v.set(2, 1, 0, true);
    const auto sv = scale(Shape(v), 2.0);
    CHECK(volume(sv.shape) == doctest::Approx(4.0 * v.volume()));
    CHECK(sv.resampling_error == doctest::Approx(0.0));
  }

  TEST_CASE("overlapping balls are rejected when flagged disjoint") {
    CHECK_THROWS_AS(BallConfig(2, {Ball{Vec(), 1.0}, Ball{Vec(1.0, 0.0), 1.0}}), ParameterError);
    const BallConfig ok(2, {Ball{Vec(), 1.0}, Ball{Vec(1.0, 0.0), 1.0}}, false);
    CHECK(ok.balls().size() == 2);
  }

  TEST_CASE("file round trips") {
    VoxelShape v(3, {3, 2, 2}, Vec(-1.0, 0.0, 0.5), 0.25);
    v.set(0, 0, 0, true);
    v.set(2, 1, 1, true);
    std::stringstream ss;
    write_voxels(ss, v);
    const VoxelShape w = read_voxels(ss);
    CHECK(w.dims() == v.dims());
    CHECK(w.cells() == v.cells());
    CHECK(w.spacing() == v.spacing());
    CHECK(w.origin() == v.origin());

    const BallConfig b(3, {Ball{Vec(0.1, 0.2, 0.3), 0.5}, Ball{Vec(2.0, 0.0, 0.0), 0.25}});
    std::stringstream bs;
    write_balls_csv(bs, b);
    const BallConfig c = read_balls_csv(bs);
    REQUIRE(c.balls().size() == 2);
    CHECK(c.balls()[0].center == b.balls()[0].center);
    CHECK(c.balls()[1].radius == 0.25);
    CHECK_THROWS_AS(load_shape("/nonexistent/shape.vox"), PathError);
    std::stringstream bad("# droplab voxel grid\ndimension 2\ndims 2 1\nspacing 1\norigin 0 0\n2x\n");
    CHECK_THROWS_AS(read_voxels(bad), ConfigError);
  }

  TEST_CASE("union of voxel sets") {
    VoxelShape a(2, {4, 4, 1}, Vec(), 1.0), b(2, {4, 4, 1}, Vec(), 1.0);
    a.set(0, 0, 0, true);
    b.set(3, 3, 0, true);
    const Shape u = unite(Shape(a), Shape(b));
    CHECK(volume(u) == doctest::Approx(2.0));
    CHECK(overlap_volume(Shape(a), Shape(b)) == 0.0);
  }
}

TEST_SUITE("geometry") {
  TEST_CASE("volume examples") {
    CHECK(volume(Shape(ball_of_volume(3, 4 * M_PI / 3))) == doctest::Approx(4.18879).epsilon(1e-6));
    CHECK(volume(Shape(VoxelShape(2, {5, 5, 1}, Vec(), 0.1))) == 0.0);
    CHECK(volume(Shape(BallConfig(2, {Ball{Vec(), 1.0}, Ball{Vec(3.0, 0.0), 1.0}}))) == doctest::Approx(2 * M_PI));
    CHECK(radius_of_volume(2, M_PI) == doctest::Approx(1.0));
    CHECK(radius_of_volume(3, 224.49) == doctest::Approx(std::cbrt(3 * 224.49 / (4 * M_PI))).epsilon(1e-14));
    CHECK(radius_of_volume(3, 224.49) == doctest::Approx(3.766).epsilon(1e-3));
  }

  TEST_CASE("slice examples") {
    const Shape b(ball_of_volume(2, 3.0));
    const auto [p, m] = slice(b, Halfspace(unit(1), 0.0));
    CHECK(volume(p) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(volume(m) == doctest::Approx(1.5).epsilon(1e-12));
    const auto [p2, m2] = slice(b, Halfspace(unit(0), 5.0));
    CHECK((p2.trivially_empty() || volume(p2) == 0.0));
    CHECK(volume(m2) == doctest::Approx(3.0));

    const int cells = 20;
    VoxelShape sq(2, {cells, cells, 1}, Vec(), 1.0 / cells);
    for (int j = 0; j < cells; ++j)
      for (int i = 0; i < cells; ++i) sq.set(i, j, 0, true);
    const auto [sp, sm] = slice(Shape(sq), Halfspace(unit(0), 0.5));
    CHECK(std::abs(volume(sp) - 0.5) <= 1.0 / cells);
    CHECK(volume(sp) + volume(sm) == volume(Shape(sq)));
  }

  TEST_CASE("indicator examples") {
    const Shape b(ball_of_volume(3, 4 * M_PI / 3));
    CHECK(indicator(b, Vec()));
    CHECK_FALSE(indicator(b, Vec(2.0, 0.0, 0.0)));
    const auto [plus, minus] = slice(b, Halfspace(unit(0), 0.0));
    CHECK_FALSE(indicator(plus, Vec(-0.5, 0.0, 0.0)));
    CHECK(indicator(minus, Vec(-0.5, 0.0, 0.0)));
  }

  TEST_CASE("monte carlo volume from the indicator converges") {
    const Shape s(BallConfig(2, {Ball{Vec(), 1.0}, Ball{Vec(1.5, 0.0), 0.4}}));
    const double exact = volume(s);
    Rng rng(5);
    const double box = 2.9 * 2.0;
    for (int n : {10000, 160000}) {
      int hits = 0;
      for (int i = 0; i < n; ++i)
        hits += indicator(s, Vec(rng.uniform(-1.0, 1.9), rng.uniform(-1.0, 1.0))) ? 1 : 0;
      const double est = box * hits / n;
      const double sd = box * std::sqrt((double(hits) / n) * (1 - double(hits) / n) / n);
      CHECK(std::abs(est - exact) < 4 * sd);
    }
  }

  TEST_CASE("scaled voxel blob on a refined grid") {
    const VoxelShape v = voxelize(Shape(BallConfig(2, {Ball{Vec(), 0.6}, Ball{Vec(0.7, 0.2), 0.4}}, false)), 0.05);
    const auto s = scale(Shape(v), 2.0);
    CHECK(std::abs(volume(s.shape) - 4.0 * v.volume()) <= 2 * 0.05);
  }
}
