#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "droplab/energy.hpp"
#include "droplab/geometry.hpp"
#include "droplab/quadrature.hpp"

namespace droplab {

/// Ball of mass m1 at the origin and ball of mass m2 centred at d e1; d = +inf is the far limit.
struct TwoBallConfig {
  double m1 = 0.0;
  double m2 = 0.0;
  double d = 0.0;
  int dimension = 2;

  double r1() const;
  double r2() const;
  /// Centre distance at which the balls touch.
  double touching() const { return r1() + r2(); }
  void validate() const;
  BallConfig balls() const;
};

EnergyReport single_ball_energy(double m, const EnergyParams& params, const QuadratureSpec& spec);

struct TwoBallReport {
  TwoBallConfig config;
  /// F_(K,A)(B1) + F_(K,0)(B2) - 2 I_K + I_riesz, with the terms regrouped as P, V and R.
  EnergyReport energy;
  EnergyReport first;    ///< F_(K,A) of the ball at the origin
  EnergyReport second;   ///< F_(K,0) of the translated ball
  IntegralEstimate kernel_cross;
  IntegralEstimate riesz_cross;
  double set_distance = 0.0;
  double riesz_bound = 0.0;   ///< 2 m1 m2 / d
  bool bound_applies = false; ///< set distance >= d / 2
};

TwoBallReport two_ball_energy(const TwoBallConfig& cfg, const EnergyParams& params, const QuadratureSpec& spec);

struct FamilyGrid {
  /// Values of m1 / m in (0, 1).
  std::vector<double> fractions{0.5, 0.4, 0.3, 0.2, 0.1};
  /// Explicit centre distances; empty: d_points log-spaced from touching to
  /// d_max_factor times the reference diameter.
  std::vector<double> distances;
  int d_points = 10;
  double d_max_factor = 1e3;
  /// Add the infinitely separated pair.
  bool include_far = true;
  /// Far-separated equal k-ball members for k = 3 .. max_balls.
  int max_balls = 2;
};

struct FamilyMember {
  std::string kind;   ///< ball, two-ball, k-balls, far-union
  int balls = 1;
  double m1 = 0.0;
  double m2 = 0.0;
  double d = 0.0;
};

struct TraceEntry {
  FamilyMember member;
  double energy = 0.0;
  double error = 0.0;
  double best_energy = 0.0;   ///< running minimum, nonincreasing along the trace
};

struct FamilySearchResult {
  double mass = 0.0;
  FamilyMember best;
  double best_energy = 0.0;
  double best_error = 0.0;
  double reference_energy = 0.0;   ///< single ball at the origin
  double reference_error = 0.0;
  /// reference - best split competitor; > 0 when splitting beats the ball, NaN without competitors
  double margin = 0.0;
  double margin_error = 0.0;
  std::vector<TraceEntry> trace;
  std::vector<std::string> warnings;
};

std::vector<double> distance_grid(double touching, double reference_diameter, const FamilyGrid& grid);

FamilySearchResult split_advantage(double m, const EnergyParams& params, const FamilyGrid& grid,
                                   const QuadratureSpec& spec);

struct SubadditivityReport {
  double m1 = 0.0;
  double m2 = 0.0;
  /// Family minimum at m1 + m2; the family includes the far union of the two part minimizers.
  FamilySearchResult total;
  FamilySearchResult part_a;   ///< family minimum at m1 with A
  FamilySearchResult part_0;   ///< family minimum at m2 with A = 0
  double residual = 0.0;       ///< total - (part_a + part_0); <= 0 up to error
  double error = 0.0;
};

SubadditivityReport weak_subadditivity_probe(double m1, double m2, const EnergyParams& params, const FamilyGrid& grid,
                                             const QuadratureSpec& spec);

struct AnnealSchedule {
  std::size_t steps = 0;
  double temperature = 0.0;
  /// Geometric cooling factor applied after every epoch.
  double ratio = 0.95;
  std::size_t epoch = 100;
};

struct AnnealTraceEntry {
  std::size_t step = 0;
  double temperature = 0.0;
  double energy = 0.0;
  double best_energy = 0.0;
  std::size_t accepted = 0;
};

struct AnnealResult {
  VoxelShape best;
  double initial_energy = 0.0;
  double best_energy = 0.0;
  std::vector<AnnealTraceEntry> trace;
  std::size_t accepted = 0;
  std::vector<std::string> warnings;
};

/// Volume-preserving pair-swap annealing of a planar voxel set on its own grid, with the
/// exact lattice energy (the value total_energy gives for the tensor method).
AnnealResult voxel_local_search(const VoxelShape& e0, const EnergyParams& params, const AnnealSchedule& schedule,
                                std::uint64_t seed);

}  // namespace droplab
