#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "droplab/geometry.hpp"
#include "droplab/vec.hpp"

namespace droplab {

/// Derive an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator with a portable uniform conversion (std distributions are
/// implementation-defined, which would break byte-identical outputs across libraries).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

/// Uniform direction on S^{N-1}.
Vec random_direction(int dimension, Rng& rng);
/// Orthonormal basis of the hyperplane orthogonal to a unit vector (N-1 vectors).
std::vector<Vec> orthonormal_complement(int dimension, const Vec& dir);

/// Deterministic nodes and weights on S^{N-1}: uniform angles (N = 2) or an
/// equal-area z-phi midpoint grid (N = 3). Weights sum to |S^{N-1}|.
struct SphereGrid {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};
SphereGrid sphere_midpoint_grid(int dimension, std::size_t budget);

/// Uniform random lines meeting a ball: direction uniform on the sphere, foot point
/// uniform in the orthogonal (N-1)-disk. `measure()` is the total measure of such lines.
class LineSampler {
public:
  LineSampler(int dimension, Frame frame, std::uint64_t seed);
  struct Line {
    Vec origin;
    Vec dir;
  };
  Line next();
  double measure() const { return measure_; }

private:
  int dimension_;
  Frame frame_;
  Rng rng_;
  double measure_;
};

/// Smallest ball containing two balls.
Frame enclosing_frame(const Frame& a, const Frame& b);

/// Running mean and variance.
class Accumulator {
public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_of_mean() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace droplab
