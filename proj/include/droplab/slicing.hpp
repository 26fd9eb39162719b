#pragma once

#include <string>
#include <utility>
#include <vector>

#include "droplab/energy.hpp"
#include "droplab/geometry.hpp"
#include "droplab/quadrature.hpp"
#include "droplab/vec.hpp"

namespace droplab {

/// Terms of the cut inequality for E split by the hyperplane {x . nu = l}.
struct SliceDefectRecord {
  Vec nu;
  double l = 0.0;
  /// int_{E+} int_{E-} |x - y|^{-alpha}.
  IntegralEstimate lhs;
  /// int_{E+} int_{E-} K(x - y); enters the right side twice.
  IntegralEstimate kernel_cross;
  /// R(E-) (or R(E+) when the A-term is carried by the plus side); zero when A = 0.
  IntegralEstimate background;
  double rhs = 0.0;
  double defect = 0.0;   ///< rhs - lhs; negative means the cut configuration beats E
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  double defect_error = 0.0;
  double plus_volume = 0.0;
  double minus_volume = 0.0;
};

SliceDefectRecord splitting_defect(const Shape& e, const Vec& nu, double l, const EnergyParams& params,
                                   const QuadratureSpec& spec);

/// Range of x . nu over the (uncut) base shape.
std::pair<double, double> extent(const Shape& e, const Vec& nu);

/// Default direction grid: uniform angles on the circle (N = 2) or a Fibonacci sphere (N = 3).
std::vector<Vec> default_directions(int dimension, int count = 0);

struct SliceGrid {
  /// Empty: default_directions.
  std::vector<Vec> directions;
  /// Empty: `offset_points` uniform offsets over the extent in each direction, padded by `padding` of its width.
  std::vector<double> offsets;
  int offset_points = 64;
  double padding = 0.1;
};

std::vector<double> offset_grid(const Shape& e, const Vec& nu, const SliceGrid& grid);

struct DirectionSummary {
  Vec nu;
  /// Trapezoid integrals over the offset grid.
  double integrated_defect = 0.0;
  double integrated_error = 0.0;
  double integrated_lhs = 0.0;
  double integrated_rhs = 0.0;
};

struct ScanResult {
  std::vector<SliceDefectRecord> records;   ///< direction-major, offsets ascending
  std::vector<DirectionSummary> directions;
  std::size_t min_index = 0;                ///< record with the most negative defect
};

/// Defect table over a direction x offset grid. Cell k uses stream k of the spec (cell 0 the spec itself).
ScanResult scan(const Shape& e, const EnergyParams& params, const SliceGrid& grid, const QuadratureSpec& spec);

/// int_{S^{N-1}} (x . nu)_+ dnu = omega_{N-2} |x| / (N - 1).
double sphere_positive_integral(const Vec& x, int dimension);
/// omega_{N-2} |x|, the value without the polar Jacobian; equal to the above only for N = 2.
double sphere_positive_integral_uncorrected(const Vec& x, int dimension);

struct SphereIntegralCheck {
  Vec x;
  double closed_form = 0.0;
  double uncorrected = 0.0;
  IntegralEstimate numeric;
  double relative_deviation = 0.0;   ///< |numeric - closed_form| / closed_form
};

SphereIntegralCheck sphere_integral_check(const Vec& x, int dimension, const QuadratureSpec& spec);

/// Layer-cake/Fubini identities for the cut family in direction nu, with the offset
/// integral done by the trapezoid rule on exact geometric cuts.
struct LayerCakeReport {
  Vec nu;
  int offset_points = 0;
  /// int_{-inf}^0 int_{E-_l} |x|^{-1} dx dl against int_{E-_0} (-x . nu) / |x| dx.
  double layered_background = 0.0;
  double direct_background = 0.0;
  double residual1 = 0.0;
  double error1 = 0.0;
  /// int_R int_{E+_l} int_{E-_l} |x - y|^{-1} dl against int_E int_E ((y - x) . nu)_+ / |x - y|.
  double layered_cross = 0.0;
  double direct_cross = 0.0;
  double residual2 = 0.0;
  double error2 = 0.0;
  std::size_t rays = 0;
  std::size_t lines = 0;
};

LayerCakeReport layer_cake_checks(const Shape& e, const Vec& nu, const QuadratureSpec& spec, int offset_points = 64);

/// Averaged cut inequality over directions and offsets. For l < 0 the A-term sits on
/// E-, for l >= 0 on E+ (the relabelled cut), so the background side integrates to
/// A * 2 c m with c = omega_{N-2}/(N-1), and the riesz side to c m^2.
struct MassBoundReport {
  double mass = 0.0;
  int directions = 0;
  int offset_points = 0;
  double sphere_constant = 0.0;             ///< omega_{N-2}/(N-1)
  double sphere_constant_uncorrected = 0.0; ///< omega_{N-2}
  /// Integrals over (nu, l) of lhs, 2 * kernel cross, A * background and the defect.
  IntegralEstimate averaged_lhs;
  IntegralEstimate averaged_kernel;
  IntegralEstimate averaged_background;
  double averaged_defect = 0.0;
  double averaged_defect_error = 0.0;
  /// The above divided by 2 c m: mass_term <= kernel_term + A * background_factor for a minimizer.
  double mass_term = 0.0;       ///< expected m / 2
  double kernel_term = 0.0;
  double background_factor = 0.0;   ///< expected 1; 0 when A = 0 (not evaluated)
  double mass_term_expected = 0.0;
  /// Closed-form side of the bound: C1 m against C2 + A.
  double c1_m = 0.0;
  double c2_plus_a = 0.0;
  bool nonexistence_signature = false;
  bool vacuous = false;
  std::vector<std::string> warnings;
};

MassBoundReport averaged_mass_bound(const Shape& e, const EnergyParams& params, const QuadratureSpec& spec,
                                    const SliceGrid& grid = {});

}  // namespace droplab
