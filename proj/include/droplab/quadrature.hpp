#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "droplab/geometry.hpp"
#include "droplab/kernels.hpp"
#include "droplab/vec.hpp"

namespace droplab {

enum class QuadratureMethod { monte_carlo, tensor_midpoint };
/// Treatment of coincident cells in generic tensor double integrals.
enum class NearDiagonal { skip_and_bound, pair_offset };
/// Monte Carlo sampling of double integrals: random lines with exact 1-D pair
/// integrals, or independent point pairs.
enum class Sampler { chord, pair };

std::string to_string(QuadratureMethod m);
std::string to_string(NearDiagonal m);
std::string to_string(Sampler m);
QuadratureMethod quadrature_method_from_string(const std::string& s);
NearDiagonal near_diagonal_from_string(const std::string& s);
Sampler sampler_from_string(const std::string& s);

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::monte_carlo;
  std::size_t budget = 100000;
  std::uint64_t seed = 1;
  NearDiagonal near_diagonal = NearDiagonal::pair_offset;
  Sampler sampler = Sampler::chord;
  /// Cells along the longest axis when a non-voxel shape is gridded.
  int grid_cells = 64;
  /// Uncut ball configurations use deterministic radial quadrature.
  bool exact_balls = true;

  void validate() const;
  /// Same spec with a derived seed, for independent sub-estimates.
  QuadratureSpec with_stream(std::uint64_t stream) const;
};

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;         ///< standard error (Monte Carlo) or refinement/quadrature delta
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::vector<std::string> warnings;
};

/// a*x + b*y with errors combined in quadrature; warnings are concatenated.
IntegralEstimate combine(const IntegralEstimate& x, double a, const IntegralEstimate& y, double b);
IntegralEstimate scaled(const IntegralEstimate& x, double a);
IntegralEstimate exact_zero(const std::string& method = "exact");

/// int_E f(x) dx.
IntegralEstimate integral_over(const Shape& E, const std::function<double(const Vec&)>& f,
                               const QuadratureSpec& spec);

/// int_E int_F g(x, y) dy dx.
IntegralEstimate double_integral(const Shape& E, const Shape& F,
                                 const std::function<double(const Vec&, const Vec&)>& g,
                                 const QuadratureSpec& spec);

/// int_E int_{E^c} K(x - y) dy dx.
IntegralEstimate complement_double_integral(const Shape& E, const Kernel& kernel, const QuadratureSpec& spec);

// Radial-weight integrals routed to the best engine for the shape and spec: radial
// quadrature for uncut disjoint balls (exact_balls), exact lattice sums for voxel sets
// (tensor method; other shapes are gridded at grid_cells and 2x coarser, the difference
// being the reported error), random lines (monte_carlo, chord) or point pairs (pair).

/// int_E int_{E^c} k(|x - y|).
IntegralEstimate radial_complement_integral(const Shape& E, const RadialProfile& k, const QuadratureSpec& spec);
/// int_E int_E g(|x - y|).
IntegralEstimate radial_self_integral(const Shape& E, const RadialProfile& g, const QuadratureSpec& spec);
/// int_U int_W g(|x - y|); PreconditionError when U and W overlap.
IntegralEstimate radial_cross_integral(const Shape& U, const Shape& W, const RadialProfile& g,
                                       const QuadratureSpec& spec);
/// int_E |x|^{-beta}.
IntegralEstimate power_integral(const Shape& E, double beta, const QuadratureSpec& spec);

/// int_{S^{N-1}} f(nu) dH^{N-1}(nu).
IntegralEstimate sphere_average(const std::function<double(const Vec&)>& f, int dimension,
                                const QuadratureSpec& spec);

}  // namespace droplab
