#pragma once

#include <string>

namespace droplab {

/// Exponent of (1 + epsilon) in the prefactor C1. The main theorem uses N + s - 1, the
/// generalized appendix N + 1 - s; the two are kept apart rather than reconciled.
enum class Convention { theorem, appendix };

std::string to_string(Convention c);
Convention convention_from_string(const std::string& s);

struct GeneralConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double p = 0.0;
};

struct ThresholdRecord {
  int dimension = 0;
  double s = 0.0;
  double epsilon = 0.0;
  double A = 0.0;
  double beta = 1.0;
  Convention convention = Convention::theorem;
  /// "closed-form" (m_c) or "root" (m_p).
  std::string kind;
  double mass = 0.0;
  GeneralConstants constants;
  // root-finder diagnostics (zero for the closed form)
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double residual_scale = 0.0;
  double phi_at_2m = 0.0;
  double phi_at_10m = 0.0;
};

/// m_c = (1/2 - (1+eps)^{-q})^{-1} (omega_{N-1} (1+eps)^{1-s} / (1-s) + A), q from the convention.
ThresholdRecord critical_mass(int dimension, double s, double epsilon, double A,
                              Convention convention = Convention::theorem);

GeneralConstants general_constants(int dimension, double s, double epsilon, double beta, Convention convention);

/// phi(x) = C1 x^{1+p} - C2 x^p - A C3.
double phi(double x, const GeneralConstants& c, double A);

struct BracketStart {
  double lower = 1e-6;
  double upper = 1.0;
};

/// Unique positive root m_p of phi by bracketed bisection.
ThresholdRecord general_critical_mass(int dimension, double s, double epsilon, double A, double beta,
                                      Convention convention = Convention::theorem, BracketStart start = {});

}  // namespace droplab
