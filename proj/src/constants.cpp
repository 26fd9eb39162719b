#include "droplab/constants.hpp"

#include <cmath>

#include "droplab/errors.hpp"

namespace droplab {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

long double unit_sphere_area(int n) {
  // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2); n = 1 gives the two points of S^0.
  return 2.0L * std::pow(kPi, n / 2.0L) / std::tgamma(n / 2.0L);
}

}  // namespace

DimensionConstants dimension_constants(int dimension) {
  if (dimension < 2) throw ParameterError("dimension must be at least 2");
  DimensionConstants c;
  c.dimension = dimension;
  c.sphere_area = unit_sphere_area(dimension);
  c.ball_volume = std::pow(kPi, dimension / 2.0L) / std::tgamma(dimension / 2.0L + 1.0L);
  c.equator_area = unit_sphere_area(dimension - 1);
  return c;
}

double sphere_area(int dimension) { return static_cast<double>(dimension_constants(dimension).sphere_area); }
double ball_volume(int dimension) { return static_cast<double>(dimension_constants(dimension).ball_volume); }
double equator_area(int dimension) { return static_cast<double>(dimension_constants(dimension).equator_area); }

double positive_part_sphere_constant(int dimension) {
  // Polar coordinates about e carry the Jacobian sin^{N-2}(theta):
  // |S^{N-2}| int_0^{pi/2} cos(theta) sin^{N-2}(theta) dtheta = |S^{N-2}| / (N - 1).
  const auto c = dimension_constants(dimension);
  return static_cast<double>(c.equator_area / (dimension - 1));
}

}  // namespace droplab
