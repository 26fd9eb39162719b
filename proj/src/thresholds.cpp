#include "droplab/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "droplab/constants.hpp"
#include "droplab/errors.hpp"

namespace droplab {

std::string to_string(Convention c) { return c == Convention::theorem ? "theorem" : "appendix"; }

Convention convention_from_string(const std::string& s) {
  if (s == "theorem") return Convention::theorem;
  if (s == "appendix") return Convention::appendix;
  throw ParameterError("unknown exponent convention '" + s + "' (theorem, appendix)");
}

namespace {

void check_inputs(int n, double s, double epsilon, double A) {
  if (n < 2) throw ParameterError("dimension must be at least 2");
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0, 1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be positive");
  if (!(A >= 0.0) || !std::isfinite(A)) throw ParameterError("A must be nonnegative");
}

long double prefactor(int n, long double s, long double epsilon, Convention convention) {
  const long double q = convention == Convention::theorem ? n + s - 1.0L : n + 1.0L - s;
  const long double c1 = 0.5L - std::pow(1.0L + epsilon, -q);
  if (!(c1 > 0.0L)) {
    std::ostringstream msg;
    msg << "degenerate prefactor: 1/2 - (1+eps)^-" << static_cast<double>(q) << " = " << static_cast<double>(c1)
        << " <= 0 (epsilon too small)";
    throw ParameterError(msg.str());
  }
  return c1;
}

long double perimeter_constant(int n, long double s, long double epsilon) {
  return dimension_constants(n).sphere_area * std::pow(1.0L + epsilon, 1.0L - s) / (1.0L - s);
}

long double phi_ld(long double x, const GeneralConstants& c, long double A) {
  const long double xp = std::pow(x, static_cast<long double>(c.p));
  return c.c1 * xp * x - c.c2 * xp - A * c.c3;
}

}  // namespace

ThresholdRecord critical_mass(int n, double s, double epsilon, double A, Convention convention) {
  check_inputs(n, s, epsilon, A);
  const long double c1 = prefactor(n, s, epsilon, convention);
  const long double c2 = perimeter_constant(n, s, epsilon);
  ThresholdRecord r;
  r.dimension = n;
  r.s = s;
  r.epsilon = epsilon;
  r.A = A;
  r.beta = 1.0;
  r.convention = convention;
  r.kind = "closed-form";
  r.constants = {static_cast<double>(c1), static_cast<double>(c2), 1.0, 0.0};
  r.mass = static_cast<double>((c2 + static_cast<long double>(A)) / c1);
  return r;
}

GeneralConstants general_constants(int n, double s, double epsilon, double beta, Convention convention) {
  check_inputs(n, s, epsilon, 0.0);
  if (!(beta >= 0.0 && beta < n + 1)) throw ParameterError("beta must lie in [0, N+1)");
  const auto dc = dimension_constants(n);
  GeneralConstants c;
  c.c1 = static_cast<double>(prefactor(n, s, epsilon, convention));
  c.c2 = static_cast<double>(perimeter_constant(n, s, epsilon));
  const long double p = (static_cast<long double>(beta) - 1.0L) / n;
  c.p = static_cast<double>(p);
  c.c3 = beta == 1.0 ? 1.0
                     : static_cast<double>(dc.sphere_area * std::pow(dc.ball_volume, -1.0L + p) /
                                           (n + 1.0L - static_cast<long double>(beta)));
  return c;
}

double phi(double x, const GeneralConstants& c, double A) {
  if (!(x > 0.0)) throw DomainError("phi is defined for x > 0");
  return static_cast<double>(phi_ld(x, c, A));
}

ThresholdRecord general_critical_mass(int n, double s, double epsilon, double A, double beta, Convention convention,
                                      BracketStart start) {
  check_inputs(n, s, epsilon, A);
  const GeneralConstants c = general_constants(n, s, epsilon, beta, convention);
  ThresholdRecord r;
  r.dimension = n;
  r.s = s;
  r.epsilon = epsilon;
  r.A = A;
  r.beta = beta;
  r.convention = convention;
  r.kind = "root";
  r.constants = c;

  long double lo = start.lower;
  int steps = 0;
  while (phi_ld(lo, c, A) >= 0.0L) {
    lo *= 0.5L;
    if (++steps > 200 || lo == 0.0L) throw NumericalError("no lower bracket with phi < 0 found below " + std::to_string(start.lower));
  }
  long double hi = start.upper;
  steps = 0;
  while (phi_ld(hi, c, A) <= 0.0L) {
    hi *= 2.0L;
    if (++steps > 200) {
      std::ostringstream msg;
      msg << "bracket failure: phi(" << static_cast<double>(hi) << ") = " << static_cast<double>(phi_ld(hi, c, A))
          << " still <= 0 after 200 doublings";
      throw NumericalError(msg.str());
    }
  }
  if (lo > hi) std::swap(lo, hi);
  r.bracket_lo = static_cast<double>(lo);
  r.bracket_hi = static_cast<double>(hi);
  int it = 0;
  while (hi - lo > 1e-12L * hi && it < 2000) {
    const long double mid = 0.5L * (lo + hi);
    if (phi_ld(mid, c, A) < 0.0L) lo = mid;
    else hi = mid;
    ++it;
  }
  const long double m = 0.5L * (lo + hi);
  r.iterations = it;
  r.mass = static_cast<double>(m);
  r.residual = static_cast<double>(phi_ld(m, c, A));
  const long double mp = std::pow(m, static_cast<long double>(c.p));
  r.residual_scale = static_cast<double>(std::max({c.c1 * mp * m, c.c2 * mp, static_cast<long double>(A) * c.c3}));
  r.phi_at_2m = static_cast<double>(phi_ld(2.0L * m, c, A));
  r.phi_at_10m = static_cast<double>(phi_ld(10.0L * m, c, A));
  if (!(r.phi_at_2m > 0.0 && r.phi_at_10m > 0.0))
    throw NumericalError("phi is not positive beyond the root; uniqueness check failed");
  return r;
}

}  // namespace droplab
