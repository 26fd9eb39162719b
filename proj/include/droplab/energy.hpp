#pragma once

#include <string>
#include <vector>

#include "droplab/geometry.hpp"
#include "droplab/kernels.hpp"
#include "droplab/quadrature.hpp"
#include "droplab/radial_profile.hpp"

namespace droplab {

struct EnergyParams {
  KernelSpec kernel;
  double A = 0.0;
  /// Riesz exponent; only alpha = 1 carries the threshold results, other values are exploratory.
  double alpha = 1.0;
  /// Background exponent.
  double beta = 1.0;

  int dimension() const { return kernel.dimension; }
  void validate() const;
};

/// F = P_K + V_alpha - A R_beta, term by term.
struct EnergyReport {
  IntegralEstimate perimeter;
  IntegralEstimate riesz;
  IntegralEstimate background;
  double total = 0.0;
  double total_error = 0.0;
  EnergyParams params;
  std::vector<std::string> warnings;
};

/// Assemble a report from its three terms.
EnergyReport assemble(const IntegralEstimate& perimeter, const IntegralEstimate& riesz,
                      const IntegralEstimate& background, const EnergyParams& params);

IntegralEstimate perimeter(const Shape& e, const EnergyParams& params, const QuadratureSpec& spec);
IntegralEstimate perimeter(const Shape& e, const Kernel& kernel, const QuadratureSpec& spec);
/// V_alpha(E) = 1/2 int_E int_E |x - y|^{-alpha}.
IntegralEstimate riesz(const Shape& e, double alpha, const QuadratureSpec& spec);
/// R_beta(E) = int_E |x|^{-beta}.
IntegralEstimate background(const Shape& e, double beta, const QuadratureSpec& spec);
EnergyReport total_energy(const Shape& e, const EnergyParams& params, const QuadratureSpec& spec);

/// Pair weight of an interaction: a kernel K or a Riesz weight |z|^{-alpha}.
struct PairWeight {
  RadialProfile profile;
  std::string name;
  static PairWeight kernel(const Kernel& k);
  static PairWeight riesz(double alpha);
};

/// int_U int_W g(x - y); PreconditionError when |U cap W| > 0.
IntegralEstimate interaction(const Shape& u, const Shape& w, const PairWeight& g, const QuadratureSpec& spec);

/// Identity residual with its combined error and the terms it was built from.
struct Residual {
  double residual = 0.0;
  double error = 0.0;
  std::vector<IntegralEstimate> terms;
};

/// P_K(U) + P_K(W) - P_K(U cup W) - 2 int_U int_W K.
Residual check_perimeter_decomposition(const Shape& u, const Shape& w, const Kernel& kernel, const QuadratureSpec& spec);
/// V(U cup W) - V(U) - V(W) - int_U int_W |x - y|^{-alpha}.
Residual check_riesz_decomposition(const Shape& u, const Shape& w, const QuadratureSpec& spec, double alpha = 1.0);

struct ScalingReport {
  double lambda = 1.0;
  /// Fitted exponents log(term(lambda E) / term(E)) / log(lambda) and their errors.
  double perimeter_exponent = 0.0, riesz_exponent = 0.0, background_exponent = 0.0;
  double perimeter_error = 0.0, riesz_error = 0.0, background_error = 0.0;
  /// Homogeneity exponents N - s, 2N - alpha, N - beta.
  double perimeter_expected = 0.0, riesz_expected = 0.0, background_expected = 0.0;
  /// False when the kernel is not homogeneous, so N - s is not exact for the perimeter.
  bool perimeter_exact = true;
  EnergyReport base;
  EnergyReport dilated;
  std::vector<std::string> warnings;
};

ScalingReport scaling_report(const Shape& e, double lambda, const EnergyParams& params, const QuadratureSpec& spec);

}  // namespace droplab
