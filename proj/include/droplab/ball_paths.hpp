#pragma once

#include "droplab/geometry.hpp"
#include "droplab/quadrature.hpp"
#include "droplab/radial_profile.hpp"

namespace droplab {

// Deterministic radial quadrature for uncut disjoint ball configurations. Double
// integrals over balls reduce to one-dimensional integrals of the lens volume
// g(rho) = |B_1 cap (B_2 + rho e)|, evaluated with Gauss panels graded toward
// the endpoint singularities.

struct Quad {
  double value = 0.0;
  double error = 0.0;
};

/// Gauss quadrature on [a, b] with geometric panels toward each end (levels_a, levels_b).
/// Ends with many levels get a geometric-series estimate of the remaining sliver.
template <class F>
Quad graded_integral(F&& f, double a, double b, int levels_a, int levels_b, int order = 16, int low = 10);

/// int_B int_{B^c} k(|x - y|) for a ball of radius r.
Quad ball_self_complement(int dimension, double r, const RadialProfile& k);
/// int_B int_B g(|x - y|).
Quad ball_self_pair(int dimension, double r, const RadialProfile& g);
/// int_{B_1} int_{B_2} g(|x - y|) for balls with centre distance d >= r1 + r2.
Quad ball_cross_pair(int dimension, double r1, double r2, double d, const RadialProfile& g);
/// int_{B_r(c)} |x|^{-beta} with |c| = dc; DomainError when it diverges.
Quad ball_power_integral(int dimension, double r, double dc, double beta);

IntegralEstimate balls_complement(const BallConfig& e, const RadialProfile& k);
IntegralEstimate balls_self_pair(const BallConfig& e, const RadialProfile& g);
IntegralEstimate balls_cross_pair(const BallConfig& u, const BallConfig& w, const RadialProfile& g);
IntegralEstimate balls_background(const BallConfig& e, double beta);

}  // namespace droplab

#include "droplab/ball_paths_impl.hpp"
