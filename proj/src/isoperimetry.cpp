#include "droplab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>

#include "droplab/constants.hpp"
#include "droplab/energy.hpp"
#include "droplab/errors.hpp"
#include "droplab/sampling.hpp"

namespace droplab {

double isoperimetric_constant(int n, double s, double lambda) {
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0, 1)");
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  return sphere_area(n) * std::pow(ball_volume(n), s / n) / (lambda * s);
}

double isoperimetric_volume_cap(int n, double epsilon) { return ball_volume(n) * std::pow(1.0 + epsilon, n); }

IsoperimetryCheck isoperimetric_check(const Shape& f, const KernelSpec& ks, const QuadratureSpec& spec,
                                      const std::string& id) {
  const Kernel kernel(ks);
  const int n = f.dimension();
  if (n != ks.dimension) throw ParameterError("kernel and shape dimensions differ");
  IsoperimetryCheck c;
  c.id = id;
  c.cap = isoperimetric_volume_cap(n, ks.epsilon);
  c.constant = isoperimetric_constant(n, ks.s, ks.lambda);
  c.volume = f.trivially_empty() ? 0.0 : volume(f);
  if (c.volume > c.cap * (1.0 + 1e-12))
    throw PreconditionError("volume " + std::to_string(c.volume) + " exceeds the isoperimetric cap " +
                            std::to_string(c.cap));
  c.bound = c.constant * std::pow(c.volume, (n - ks.s) / n);
  c.perimeter = perimeter(f, kernel, spec);
  c.slack = c.perimeter.value - c.bound;
  c.error = c.perimeter.error;
  return c;
}

VoxelShape random_blob(int n, std::uint64_t seed, double cap, const BlobOptions& o) {
  if (n != 2 && n != 3) throw ParameterError("random blobs support dimensions 2 and 3");
  if (!(cap > 0.0)) throw ParameterError("volume cap must be positive");
  if (o.min_balls < 1 || o.max_balls < o.min_balls) throw ParameterError("invalid ball count range");
  if (!(o.min_fraction > 0.0 && o.max_fraction <= 1.0 && o.min_fraction <= o.max_fraction))
    throw ParameterError("invalid volume fraction range");
  Rng rng(seed);
  const int k = o.min_balls + static_cast<int>(rng.below(static_cast<std::uint64_t>(o.max_balls - o.min_balls + 1)));
  std::vector<Ball> balls;
  double rmin = 1.0;
  for (int i = 0; i < k; ++i) {
    Ball b;
    for (int a = 0; a < n; ++a) b.center[a] = rng.uniform(-1.0, 1.0);
    b.radius = rng.uniform(0.3, 1.0);
    rmin = std::min(rmin, b.radius);
    balls.push_back(b);
  }
  const double target = cap * rng.uniform(o.min_fraction, o.max_fraction);
  const double h0 = rmin / o.cells_per_radius;
  const double v0 = voxelize(Shape(BallConfig(n, balls, false)), h0).volume();
  const double sigma = std::pow(target / v0, 1.0 / n);
  for (auto& b : balls) {
    b.center = b.center * sigma;
    b.radius *= sigma;
  }
  double h = sigma * h0;
  VoxelShape v = voxelize(Shape(BallConfig(n, balls, false)), h);
  // Grid alignment can change the volume slightly; refine until the cap holds.
  while (v.volume() > cap) {
    h *= 0.8;
    v = voxelize(Shape(BallConfig(n, balls, false)), h);
  }
  return v;
}

std::pair<VoxelShape, VoxelShape> random_voxel_pair(int n, int cells, std::uint64_t seed) {
  if (n != 2 && n != 3) throw ParameterError("random voxel pairs support dimensions 2 and 3");
  if (cells < 4) throw ParameterError("random voxel pairs need at least 4 cells per axis");
  Rng rng(seed);
  const double h = 1.0 / cells;
  const std::array<int, 3> dims{cells, cells, n == 3 ? cells : 1};
  std::vector<Ball> balls(1 + rng.below(4));
  for (auto& b : balls) {
    for (int a = 0; a < n; ++a) b.center[a] = rng.uniform(0.3, 0.7);
    b.radius = rng.uniform(0.1, 0.28);
  }
  const Shape blob(BallConfig(n, balls, false));
  Vec nu;
  for (int a = 0; a < n; ++a) nu[a] = rng.uniform(-1.0, 1.0);
  if (norm(nu) < 1e-3) nu = unit(0);
  nu = nu * (1.0 / norm(nu));
  const double l = dot(balls.front().center, nu) + rng.uniform(-0.5, 0.5) * balls.front().radius;
  const double gap = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 3.0) * h;
  VoxelShape u(n, dims, Vec(), h), w(n, dims, Vec(), h);
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        const Vec c = u.cell_center(i, j, k);
        if (!blob.indicator(c)) continue;
        const double t = dot(c, nu) - l;
        if (t >= gap) u.set(i, j, k, true);
        else if (t < 0.0) w.set(i, j, k, true);
      }
  return {u, w};
}

}  // namespace droplab
