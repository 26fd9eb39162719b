#pragma once

#include <cstdint>

#include "droplab/geometry.hpp"
#include "droplab/quadrature.hpp"
#include "droplab/radial_profile.hpp"
#include "droplab/sampling.hpp"

namespace droplab {

// Random-line engine. For any integrable f,
//   int int f(x, y) dx dy = 1/2 int_{S^{N-1}} int_{theta-perp} int int f(p + t theta, p + u theta) |u - t|^{N-1} dt du dp dtheta,
// so a radial pair weight g(|x - y|) reduces on each line to the 1-D density g(r) r^{N-1},
// whose pair integrals over intervals are exact (LineKernel). Every per-line value is bounded,
// which keeps the estimator variance finite even for hypersingular kernels.

/// int_A int_{R \ A} kappa(|u - t|) for a sorted disjoint interval list A. Needs a tail-normalized kernel.
double line_complement_sum(const LineKernel& kappa, const Intervals& a);
/// int_A int_A kappa(|u - t|).
double line_self_sum(const LineKernel& kappa, const Intervals& a);
/// int_A int_B kappa(|u - t|); throws PreconditionError when A and B overlap.
double line_cross_sum(const LineKernel& kappa, const Intervals& a, const Intervals& b);

/// 1/2 * (line measure) * E[line_value] over `n` uniform lines through `frame`.
template <class F>
IntegralEstimate chord_estimate(int dimension, const Frame& frame, std::size_t n, std::uint64_t seed, F&& line_value) {
  IntegralEstimate est;
  est.method = "monte-carlo/chord";
  est.seed = seed;
  est.samples = n;
  if (frame.radius <= 0.0) return est;
  LineSampler sampler(dimension, frame, seed);
  Accumulator acc;
  for (std::size_t i = 0; i < n; ++i) {
    const auto line = sampler.next();
    acc.add(line_value(line.origin, line.dir));
  }
  const double scale = 0.5 * sampler.measure();
  est.value = scale * acc.mean();
  est.error = scale * acc.stderr_of_mean();
  return est;
}

/// Line density g(r) r^{N-1} of a radial pair weight.
LineKernel line_density(const RadialProfile& g, int dimension);

IntegralEstimate chord_complement(const Shape& e, const RadialProfile& k, const QuadratureSpec& spec);
IntegralEstimate chord_self(const Shape& e, const RadialProfile& g, const QuadratureSpec& spec);
IntegralEstimate chord_cross(const Shape& u, const Shape& w, const RadialProfile& g, const QuadratureSpec& spec);

/// int over t > 0 of t^{expo} on the intervals of a ray (divergent at 0 -> DomainError).
double ray_power_integral(const Intervals& iv, double expo);

/// int_E |x|^{-beta} dx by rays from the origin (random or midpoint directions).
IntegralEstimate ray_background(const Shape& e, double beta, const QuadratureSpec& spec);

}  // namespace droplab
