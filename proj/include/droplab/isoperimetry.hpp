#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "droplab/geometry.hpp"
#include "droplab/kernels.hpp"
#include "droplab/quadrature.hpp"

namespace droplab {

struct IsoperimetryCheck {
  std::string id;
  double volume = 0.0;
  double cap = 0.0;        ///< omega_N (1 + epsilon)^N
  double constant = 0.0;   ///< C = omega_{N-1} omega_N^{s/N} / (lambda s)
  double bound = 0.0;      ///< C |F|^{(N-s)/N}
  IntegralEstimate perimeter;
  double slack = 0.0;      ///< P_K(F) - bound
  double error = 0.0;
};

double isoperimetric_constant(int dimension, double s, double lambda);
/// Largest volume the lower bound covers.
double isoperimetric_volume_cap(int dimension, double epsilon);

/// PreconditionError when |F| exceeds the volume cap.
IsoperimetryCheck isoperimetric_check(const Shape& f, const KernelSpec& kernel, const QuadratureSpec& spec,
                                      const std::string& id = "");

struct BlobOptions {
  int min_balls = 1;
  int max_balls = 5;
  /// Target volume as a fraction of the cap, drawn uniformly from this range.
  double min_fraction = 0.05;
  double max_fraction = 0.9;
  /// Grid cells per smallest radius.
  double cells_per_radius = 6.0;
};

/// Seeded union of random balls, voxelized and scaled so that its volume stays below `cap`.
VoxelShape random_blob(int dimension, std::uint64_t seed, double cap, const BlobOptions& options = {});

/// Seeded pair of disjoint voxel sets on one cells^N lattice of the unit cube: a random
/// union of balls split by a random hyperplane, sometimes with a gap between the parts.
std::pair<VoxelShape, VoxelShape> random_voxel_pair(int dimension, int cells, std::uint64_t seed);

}  // namespace droplab
