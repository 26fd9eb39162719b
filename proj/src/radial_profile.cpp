#include "droplab/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "droplab/errors.hpp"

namespace droplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double a, double b) { return std::abs(a - b) < 1e-13; }

}  // namespace

double power_antiderivative(double coef, double expo, double r) {
  if (coef == 0.0) return 0.0;
  if (near(expo, -1.0)) return coef * std::log(r);
  if (r == 0.0) return expo > -1.0 ? 0.0 : -kInf * coef;
  if (std::isinf(r)) return expo < -1.0 ? 0.0 : kInf * coef;
  return coef * std::pow(r, expo + 1.0) / (expo + 1.0);
}

double power_second_antiderivative(double coef, double expo, double r) {
  if (coef == 0.0) return 0.0;
  if (near(expo, -1.0)) return r == 0.0 ? 0.0 : coef * (r * std::log(r) - r);
  if (near(expo, -2.0)) return -coef * std::log(r);
  if (r == 0.0) return expo > -2.0 ? 0.0 : kInf;
  return coef * std::pow(r, expo + 2.0) / ((expo + 1.0) * (expo + 2.0));
}

RadialProfile::RadialProfile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ParameterError("radial profile needs at least one piece");
  if (pieces_.front().lo != 0.0) throw ParameterError("radial profile must start at r = 0");
  if (!std::isinf(pieces_.back().hi)) throw ParameterError("radial profile must extend to infinity");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.hi > p.lo)) throw ParameterError("radial profile pieces must have positive length");
    if (i + 1 < pieces_.size() && pieces_[i + 1].lo != p.hi)
      throw ParameterError("radial profile pieces must be contiguous");
    if (!std::isfinite(p.coef) || !std::isfinite(p.expo))
      throw ParameterError("radial profile coefficients must be finite");
  }
}

RadialProfile RadialProfile::power(double coef, double expo) {
  return RadialProfile({{0.0, kInf, coef, expo}});
}

std::size_t RadialProfile::locate(double r) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), r,
                             [](double v, const Piece& p) { return v < p.hi; });
  if (it == pieces_.end()) return pieces_.size() - 1;
  return static_cast<std::size_t>(it - pieces_.begin());
}

double RadialProfile::operator()(double r) const {
  const auto& p = pieces_[locate(r)];
  if (p.coef == 0.0) return 0.0;
  return p.coef * std::pow(r, p.expo);
}

RadialProfile RadialProfile::times_power(double k) const {
  auto out = pieces_;
  for (auto& p : out) p.expo += k;
  return RadialProfile(std::move(out));
}

RadialProfile RadialProfile::scaled(double factor) const {
  auto out = pieces_;
  for (auto& p : out) p.coef *= factor;
  return RadialProfile(std::move(out));
}

RadialProfile RadialProfile::dilated(double a) const {
  if (!(a > 0.0)) throw ParameterError("dilation factor must be positive");
  auto out = pieces_;
  for (auto& p : out) {
    p.lo /= a;
    p.hi /= a;
    p.coef *= std::pow(a, p.expo);
  }
  out.front().lo = 0.0;
  return RadialProfile(std::move(out));
}

double RadialProfile::integral(double a, double b) const {
  if (b <= a) return 0.0;
  double sum = 0.0;
  for (std::size_t i = locate(a); i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    const double lo = std::max(a, p.lo);
    const double hi = std::min(b, p.hi);
    if (hi > lo) {
      sum += power_antiderivative(p.coef, p.expo, hi) - power_antiderivative(p.coef, p.expo, lo);
    }
    if (p.hi >= b) break;
  }
  return sum;
}

double RadialProfile::tail(double radius) const { return integral(radius, kInf); }
double RadialProfile::head(double radius) const { return integral(0.0, radius); }

bool RadialProfile::integrable_at_zero() const {
  const auto& p = pieces_.front();
  return p.coef == 0.0 || p.expo > -1.0;
}

bool RadialProfile::integrable_at_infinity() const {
  const auto& p = pieces_.back();
  return p.coef == 0.0 || p.expo < -1.0;
}

std::string RadialProfile::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& p : pieces_) os << p.lo << ':' << p.coef << ':' << p.expo << ';';
  return os.str();
}

LineKernel::LineKernel(RadialProfile density) : density_(std::move(density)) {
  const auto& pieces = density_.pieces();
  const auto& first = pieces.front();
  if (density_.integrable_at_infinity()) {
    tail_normalized_ = true;
    if (!(first.coef == 0.0 || first.expo > -2.0))
      throw ParameterError("line density too singular at the origin for pair integrals");
  } else if (density_.integrable_at_zero()) {
    tail_normalized_ = false;
  } else {
    throw ParameterError("line density integrable neither at the origin nor at infinity");
  }

  const std::size_t n = pieces.size();
  offset_.assign(n, 0.0);
  phi_lo_.assign(n, 0.0);
  if (tail_normalized_) {
    // Phi'(r) = -int_r^inf kappa = P1_i(r) - (P1_i(hi_i) + tail(hi_i)).
    double tail_above = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      const auto& p = pieces[k];
      offset_[k] = -(power_antiderivative(p.coef, p.expo, p.hi) + tail_above);
      if (std::isinf(p.hi)) offset_[k] = 0.0;
      tail_above += density_.integral(p.lo, p.hi);
    }
  } else {
    // Phi'(r) = int_0^r kappa = head(lo_i) + P1_i(r) - P1_i(lo_i).
    for (std::size_t k = 0; k < n; ++k) {
      const auto& p = pieces[k];
      const double p1lo = p.lo == 0.0 ? 0.0 : power_antiderivative(p.coef, p.expo, p.lo);
      offset_[k] = density_.head(p.lo) - p1lo;
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    const auto& p = pieces[k - 1];
    const double p2lo = p.lo == 0.0 ? 0.0 : power_second_antiderivative(p.coef, p.expo, p.lo);
    phi_lo_[k] = phi_lo_[k - 1] + power_second_antiderivative(p.coef, p.expo, p.hi) - p2lo +
                 offset_[k - 1] * (p.hi - p.lo);
  }
}

double LineKernel::potential(double r) const {
  if (r <= 0.0) return 0.0;
  const std::size_t k = density_.locate(r);
  const auto& p = density_.pieces()[k];
  const double p2lo = p.lo == 0.0 ? 0.0 : power_second_antiderivative(p.coef, p.expo, p.lo);
  return phi_lo_[k] + power_second_antiderivative(p.coef, p.expo, r) - p2lo + offset_[k] * (r - p.lo);
}

double LineKernel::slope(double r) const {
  const std::size_t k = density_.locate(r);
  const auto& p = density_.pieces()[k];
  return power_antiderivative(p.coef, p.expo, r) + offset_[k];
}

double LineKernel::pair(double a, double b, double c, double d) const {
  if (b <= a) return 0.0;
  if (std::isinf(d)) {
    if (!tail_normalized_) return kInf;
    return potential(c - b) - potential(c - a);
  }
  if (d <= c) return 0.0;
  return potential(d - a) - potential(d - b) - potential(c - a) + potential(c - b);
}

double LineKernel::self(double a, double b) const {
  if (b <= a) return 0.0;
  if (tail_normalized_) {
    if (!density_.integrable_at_zero()) return kInf;
    // Phi'(0) = -int_0^inf kappa under the tail normalization.
    return potential(b - a) + density_.tail(0.0) * (b - a);
  }
  return potential(b - a);
}

}  // namespace droplab
