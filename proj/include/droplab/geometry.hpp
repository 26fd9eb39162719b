#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "droplab/vec.hpp"

namespace droplab {

/// Closed interval [lo, hi] of a line parameter.
struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

using Intervals = std::vector<Interval>;

/// Sort and merge overlapping or touching intervals; drops empty ones.
Intervals merge_intervals(Intervals iv);

/// Bounding ball used to sample lines; shared by a shape and all of its cuts.
struct Frame {
  Vec center;
  double radius = 0.0;
};

struct Ball {
  Vec center;
  double radius = 0.0;
};

class BallConfig {
public:
  BallConfig() = default;
  BallConfig(int dimension, std::vector<Ball> balls, bool disjoint = true);

  int dimension() const { return dimension_; }
  const std::vector<Ball>& balls() const { return balls_; }
  bool disjoint() const { return disjoint_; }
  bool empty() const { return balls_.empty(); }

private:
  int dimension_ = 2;
  std::vector<Ball> balls_;
  bool disjoint_ = true;
};

/// Cells indexed (i, j, k) with i fastest; cell (i, j, k) covers origin + h*[i, i+1) x ...
class VoxelShape {
public:
  VoxelShape() = default;
  VoxelShape(int dimension, std::array<int, 3> dims, Vec origin, double spacing);

  int dimension() const { return dimension_; }
  const std::array<int, 3>& dims() const { return dims_; }
  const Vec& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t count() const { return count_; }
  double volume() const;

  bool at(int i, int j, int k = 0) const;
  void set(int i, int j, int k, bool value);
  bool at_index(std::size_t idx) const { return cells_[idx] != 0; }
  std::size_t index(int i, int j, int k = 0) const;
  std::array<int, 3> coords(std::size_t idx) const;
  Vec cell_center(int i, int j, int k = 0) const;
  Vec upper_corner() const;

  const std::vector<std::uint8_t>& cells() const { return cells_; }

private:
  int dimension_ = 2;
  std::array<int, 3> dims_{0, 1, 1};
  Vec origin_;
  double spacing_ = 1.0;
  std::vector<std::uint8_t> cells_;
  std::size_t count_ = 0;
};

/// H+ = {x . nu >= l}.
struct Halfspace {
  Vec nu;
  double l = 0.0;
  Halfspace() = default;
  Halfspace(const Vec& nu, double l);
  bool contains(const Vec& x) const { return dot(x, nu) >= l; }
  Halfspace flipped() const { return Halfspace(-nu, -l); }
};

/// A ball configuration or voxel set, optionally intersected with halfspaces.
class Shape {
public:
  Shape() = default;
  Shape(BallConfig balls);
  Shape(VoxelShape voxels);

  static Shape empty(int dimension);

  int dimension() const;
  bool is_balls() const { return std::holds_alternative<BallConfig>(base_); }
  bool is_voxels() const { return std::holds_alternative<VoxelShape>(base_); }
  bool has_cuts() const { return !cuts_.empty(); }
  /// Uncut ball configuration (eligible for the exact 1-D paths).
  bool plain_balls() const { return is_balls() && cuts_.empty(); }
  bool plain_voxels() const { return is_voxels() && cuts_.empty(); }

  const BallConfig& balls() const;
  const VoxelShape& voxels() const;
  const std::vector<Halfspace>& cuts() const { return cuts_; }

  bool indicator(const Vec& x) const;
  /// Sorted disjoint parameter intervals of {t : origin + t*dir in E}; dir must be a unit vector.
  Intervals line_intervals(const Vec& origin, const Vec& dir) const;
  Frame frame() const;
  /// Axis-aligned bounds of the base shape (cuts ignored).
  std::pair<Vec, Vec> bounds() const;
  /// True when the set is certainly empty (no balls, no cells).
  bool trivially_empty() const;

  /// Exact intersection with a halfspace (geometric cut, also for voxel sets).
  Shape cut(const Halfspace& h) const;

  friend Shape translate_impl(const Shape&, const Vec&);
  friend Shape scale_impl(const Shape&, double);

private:
  std::variant<BallConfig, VoxelShape> base_;
  std::vector<Halfspace> cuts_;
};

/// Lebesgue volume; throws PreconditionError for overlapping balls without a disjointness guarantee.
double volume(const Shape& shape);

/// (E cap H+, E cap H-). Voxel sets are split by cell centre; other shapes are cut exactly.
std::pair<Shape, Shape> slice(const Shape& shape, const Halfspace& h);

Shape translate(const Shape& shape, const Vec& v);

struct ScaleResult {
  Shape shape;
  double resampling_error = 0.0;   ///< | |result| - lambda^N |E| |
};

/// lambda E. Voxel sets are resampled onto a grid with the original spacing.
ScaleResult scale(const Shape& shape, double lambda);

bool indicator(const Shape& shape, const Vec& x);

BallConfig ball_of_volume(int dimension, double mass);

/// Radius of the N-ball of the given volume.
double radius_of_volume(int dimension, double mass);

/// Midpoint classification of any shape on a grid with spacing h covering its bounds.
VoxelShape voxelize(const Shape& shape, double spacing);
/// Voxelize two shapes on one common lattice of the given spacing.
std::pair<VoxelShape, VoxelShape> voxelize_common(const Shape& a, const Shape& b, double spacing);

/// Re-embed a voxel set into a lattice-compatible grid spanning both shapes.
std::pair<VoxelShape, VoxelShape> common_lattice(const VoxelShape& a, const VoxelShape& b);
bool same_lattice(const VoxelShape& a, const VoxelShape& b);
/// Union of two voxel sets on the same lattice.
VoxelShape voxel_union(const VoxelShape& a, const VoxelShape& b);

/// Volume of the intersection of two N-balls with radii r1, r2 at centre distance d.
double lens_volume(int dimension, double r1, double r2, double d);
/// Volume of the cap {x in B_r : x . e >= r - h}.
double cap_volume(int dimension, double r, double h);

/// |a cap b|, exact for ball configurations and same-lattice voxel sets,
/// otherwise a deterministic midpoint estimate on a fine grid.
double overlap_volume(const Shape& a, const Shape& b);

void write_voxels(std::ostream& os, const VoxelShape& v);
VoxelShape read_voxels(std::istream& is);
void write_balls_csv(std::ostream& os, const BallConfig& b);
BallConfig read_balls_csv(std::istream& is, int dimension_hint = 0);

/// Union of two shapes with disjoint interiors: ball configurations, or voxel sets on a shared lattice.
Shape unite(const Shape& a, const Shape& b);

/// Load a shape; ball CSV by ".csv" extension, voxel text grid otherwise.
Shape load_shape(const std::string& path, int dimension_hint = 0);
void save_shape(const std::string& path, const Shape& shape);

}  // namespace droplab
