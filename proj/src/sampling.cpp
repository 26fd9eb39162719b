#include "droplab/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "droplab/constants.hpp"
#include "droplab/errors.hpp"

namespace droplab {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined words
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ParameterError("Rng::below needs n > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

Vec random_direction(int dimension, Rng& rng) {
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  if (dimension == 2) return Vec(std::cos(phi), std::sin(phi));
  if (dimension != 3) throw ParameterError("directions supported for N = 2, 3");
  const double z = 2.0 * rng.uniform() - 1.0;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec(rho * std::cos(phi), rho * std::sin(phi), z);
}

std::vector<Vec> orthonormal_complement(int dimension, const Vec& d) {
  if (dimension == 2) return {Vec(-d[1], d[0])};
  // Branchless basis construction for a unit vector (Duff et al.).
  const double sign = std::copysign(1.0, d[2]);
  const double a = -1.0 / (sign + d[2]);
  const double b = d[0] * d[1] * a;
  return {Vec(1.0 + sign * d[0] * d[0] * a, sign * b, -sign * d[0]), Vec(b, sign + d[1] * d[1] * a, -d[1])};
}

SphereGrid sphere_midpoint_grid(int dimension, std::size_t budget) {
  SphereGrid g;
  if (dimension == 2) {
    const std::size_t n = std::max<std::size_t>(budget, 4);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double phi = (static_cast<double>(i) + 0.5) * w;
      g.nodes.emplace_back(std::cos(phi), std::sin(phi));
      g.weights.push_back(w);
    }
    return g;
  }
  if (dimension != 3) throw ParameterError("sphere grids supported for N = 2, 3");
  const std::size_t nz = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(static_cast<double>(budget) / 2.0)));
  const std::size_t nphi = 2 * nz;
  const double w = 4.0 * std::numbers::pi / static_cast<double>(nz * nphi);
  for (std::size_t i = 0; i < nz; ++i) {
    const double z = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(nz);
    const double rho = std::sqrt(1.0 - z * z);
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(nphi);
      g.nodes.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
      g.weights.push_back(w);
    }
  }
  return g;
}

LineSampler::LineSampler(int dimension, Frame frame, std::uint64_t seed)
    : dimension_(dimension), frame_(frame), rng_(seed) {
  if (dimension != 2 && dimension != 3) throw ParameterError("line sampling supported for N = 2, 3");
  const double disk = dimension == 2 ? 2.0 * frame.radius : std::numbers::pi * frame.radius * frame.radius;
  measure_ = sphere_area(dimension) * disk;
}

LineSampler::Line LineSampler::next() {
  Line line;
  line.dir = random_direction(dimension_, rng_);
  const auto basis = orthonormal_complement(dimension_, line.dir);
  line.origin = frame_.center;
  if (dimension_ == 2) {
    line.origin += basis[0] * (frame_.radius * (2.0 * rng_.uniform() - 1.0));
  } else {
    const double r = frame_.radius * std::sqrt(rng_.uniform());
    const double a = 2.0 * std::numbers::pi * rng_.uniform();
    line.origin += basis[0] * (r * std::cos(a)) + basis[1] * (r * std::sin(a));
  }
  return line;
}

Frame enclosing_frame(const Frame& a, const Frame& b) {
  if (b.radius == 0.0 && a.radius > 0.0) return a;
  if (a.radius == 0.0) return b;
  const Vec diff = b.center - a.center;
  const double d = norm(diff);
  if (d + b.radius <= a.radius) return a;
  if (d + a.radius <= b.radius) return b;
  const double r = 0.5 * (d + a.radius + b.radius);
  Frame f;
  f.radius = r;
  f.center = a.center + diff * ((r - a.radius) / d);
  return f;
}

}  // namespace droplab
