#pragma once

#include <array>
#include <memory>
#include <vector>

#include "droplab/geometry.hpp"
#include "droplab/quadrature.hpp"
#include "droplab/radial_profile.hpp"

namespace droplab {

// Exact double integrals over voxel sets on a common lattice of spacing h.
// For unions of cells, int_U int_W g(|x - y|) = sum_o w(o) X(o), where X(o) counts
// cell pairs at offset o and w(o) = int g(|z|) Lambda(z - o h) dz with Lambda the
// product tent (the autocorrelation of one cell). Only the weights need quadrature.

/// Offset weights w(o) for |o_k| <= extent_k, plus optionally the self-complement
/// weight int_cell int_{cell^c} g of one cell.
class LatticeWeights {
public:
  LatticeWeights(const RadialProfile& g, int dimension, double spacing, std::array<int, 3> extent, bool complement);

  double weight(int a, int b, int c = 0) const { return w_[slot(a, b, c)]; }
  double error(int a, int b, int c = 0) const { return e_[slot(a, b, c)]; }
  double cell_complement() const { return cell_complement_; }
  double cell_complement_error() const { return cell_complement_error_; }
  const std::array<int, 3>& extent() const { return extent_; }

private:
  std::size_t slot(int a, int b, int c) const;
  int dimension_;
  std::array<int, 3> extent_;
  std::vector<double> w_;
  std::vector<double> e_;
  double cell_complement_ = 0.0;
  double cell_complement_error_ = 0.0;
};

/// Cached weight table covering at least `extent`.
std::shared_ptr<const LatticeWeights> lattice_weights(const RadialProfile& g, int dimension, double spacing,
                                                      std::array<int, 3> extent, bool complement);

/// Cross-correlation X(o) = #{i : a(i) and b(i + o)} for two grids of equal dims.
class Correlation {
public:
  Correlation(const VoxelShape& a, const VoxelShape& b);
  double at(int a, int b, int c = 0) const;
  const std::array<int, 3>& dims() const { return dims_; }

private:
  std::array<int, 3> dims_;
  std::array<int, 3> padded_;
  std::vector<double> values_;
};

/// int_E int_{E^c} k(|x - y|).
IntegralEstimate lattice_complement(const VoxelShape& e, const RadialProfile& k);
/// int_U int_W g(|x - y|) on a shared lattice (U == W allowed when g is integrable at 0).
IntegralEstimate lattice_pair(const VoxelShape& u, const VoxelShape& w, const RadialProfile& g);
/// int_E |x|^{-beta}. When beta >= N, cells whose closure holds the origin are excluded
/// with a warning, so the value is a lower bound.
IntegralEstimate lattice_background(const VoxelShape& e, double beta);

/// int of |x|^{-beta} over an axis-aligned box (degenerate axes allowed).
struct BoxIntegral {
  double value = 0.0;
  double error = 0.0;
  bool singular = false;
};
BoxIntegral box_power_integral(const Vec& lo, const Vec& hi, int dimension, double beta);

}  // namespace droplab
