#pragma once

#include <string>
#include <vector>

namespace droplab {

/// Piecewise power law f(r) = coef_i * r^expo_i on [lo_i, hi_i).
///
/// The pieces tile [0, inf) without gaps. Every radial function the library
/// integrates (fractional and capped kernels, log-log tabulated kernels,
/// Riesz weights |z|^-alpha and their r^(N-1) line densities) has this form,
/// which gives closed-form radial integrals on every piece.
class RadialProfile {
public:
  struct Piece {
    double lo;
    double hi;
    double coef;
    double expo;
  };

  RadialProfile() = default;
  explicit RadialProfile(std::vector<Piece> pieces);

  static RadialProfile power(double coef, double expo);

  double operator()(double r) const;

  /// Profile multiplied by r^k.
  RadialProfile times_power(double k) const;
  RadialProfile scaled(double factor) const;
  /// g(r) = f(a r).
  RadialProfile dilated(double a) const;

  /// Integral over [a, b]; b may be +inf.
  double integral(double a, double b) const;
  double tail(double radius) const;
  double head(double radius) const;

  bool integrable_at_zero() const;
  bool integrable_at_infinity() const;

  double leading_exponent() const { return pieces_.front().expo; }
  double trailing_exponent() const { return pieces_.back().expo; }
  bool homogeneous() const { return pieces_.size() == 1; }

  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t locate(double r) const;
  std::string fingerprint() const;

private:
  std::vector<Piece> pieces_;
};

/// First and second antiderivatives of a single power piece.
double power_antiderivative(double coef, double expo, double r);
double power_second_antiderivative(double coef, double expo, double r);

/// Exact one-dimensional pair integrals for a line density kappa.
///
/// potential() is a second antiderivative Phi with Phi'' = kappa, normalized
/// so that Phi(0) = 0 and either Phi'(inf) = 0 (integrable tail) or
/// Phi'(0) = 0 (integrable head). Then for ordered intervals b <= c
///   int_a^b int_c^d kappa(u - t) du dt = Phi(d-a) - Phi(d-b) - Phi(c-a) + Phi(c-b).
class LineKernel {
public:
  explicit LineKernel(RadialProfile density);

  double potential(double r) const;
  double slope(double r) const;

  /// int_a^b int_c^d kappa(u - t) du dt with b <= c; d may be +inf.
  double pair(double a, double b, double c, double d) const;
  /// int_a^b int_t^b kappa(u - t) du dt. Requires an integrable head.
  double self(double a, double b) const;

  bool tail_normalized() const { return tail_normalized_; }
  const RadialProfile& density() const { return density_; }

private:
  RadialProfile density_;
  bool tail_normalized_ = true;
  std::vector<double> offset_;   // B_i: Phi'(r) = P1_i(r) + B_i
  std::vector<double> phi_lo_;   // Phi(lo_i)
};

}  // namespace droplab
