#pragma once

namespace droplab {

/// Measures attached to the dimension N.
struct DimensionConstants {
  int dimension = 0;
  long double sphere_area = 0;    ///< surface measure of S^{N-1}
  long double ball_volume = 0;    ///< volume of the unit ball in R^N
  long double equator_area = 0;   ///< surface measure of S^{N-2}; 2 when N = 2
};

DimensionConstants dimension_constants(int dimension);

double sphere_area(int dimension);
double ball_volume(int dimension);
double equator_area(int dimension);

/// int_{S^{N-1}} (e . nu)_+ dH^{N-1}(nu) for a unit vector e.
double positive_part_sphere_constant(int dimension);

}  // namespace droplab
