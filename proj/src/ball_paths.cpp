#include "droplab/ball_paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "droplab/constants.hpp"
#include "droplab/errors.hpp"

namespace droplab {

namespace {

constexpr int kSingular = 40;
constexpr int kMild = 3;

// (N-1)-volume of the equatorial section of B_r.
double section(int n, double r) { return n == 2 ? 2.0 * r : std::numbers::pi * r * r; }

// |B_r| - lens(r, r, rho) - section * rho, evaluated without cancellation.
double lens_remainder(int n, double r, double rho) {
  if (n == 3) return -std::numbers::pi * rho * rho * rho / 12.0;
  const double x = rho / (2.0 * r);
  double asin_minus_x;
  if (x < 0.05) {
    const double x2 = x * x;
    asin_minus_x = x * x2 * (1.0 / 6.0 + x2 * (3.0 / 40.0 + x2 * (5.0 / 112.0 + x2 * (35.0 / 1152.0))));
  } else {
    asin_minus_x = std::asin(x) - x;
  }
  const double sqrt_minus_one = -x * x / (1.0 + std::sqrt(std::max(0.0, 1.0 - x * x)));
  return 2.0 * r * r * asin_minus_x + r * rho * sqrt_minus_one;
}

// Breakpoints of [a, b] at profile piece boundaries (and extra points), sorted.
std::vector<double> segments(double a, double b, const RadialProfile& p, std::vector<double> extra = {}) {
  std::vector<double> pts{a, b};
  for (const auto& piece : p.pieces())
    if (piece.lo > a && piece.lo < b) pts.push_back(piece.lo);
  for (double x : extra)
    if (x > a && x < b) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Sum of graded integrals over consecutive segments, strong grading at the outer ends
// when flagged and mild grading at interior breakpoints.
template <class F>
Quad piecewise(F&& f, const std::vector<double>& pts, bool singular_lo, bool singular_hi, int order = 16,
               int low = 10) {
  Quad q;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const int la = i == 0 ? (singular_lo ? kSingular : kMild) : kMild;
    const int lb = i + 2 == pts.size() ? (singular_hi ? kSingular : kMild) : kMild;
    const Quad p = graded_integral(f, pts[i], pts[i + 1], la, lb, order, low);
    q.value += p.value;
    q.error += p.error;
  }
  return q;
}

}  // namespace

Quad ball_self_complement(int n, double r, const RadialProfile& k) {
  const RadialProfile kappa = k.times_power(n - 1);
  if (!kappa.integrable_at_infinity()) throw ParameterError("kernel tail is not integrable; the perimeter diverges");
  const double c1 = section(n, r);
  const double vol = ball_volume(n) * std::pow(r, n);
  const Quad rem =
      piecewise([&](double rho) { return kappa(rho) * lens_remainder(n, r, rho); }, segments(0.0, 2.0 * r, kappa),
                true, true);
  const double linear = c1 * kappa.times_power(1).integral(0.0, 2.0 * r);
  const double far = vol * kappa.tail(2.0 * r);
  const double area = sphere_area(n);
  return {area * (rem.value + linear + far), area * rem.error};
}

Quad ball_self_pair(int n, double r, const RadialProfile& g) {
  const RadialProfile kappa = g.times_power(n - 1);
  if (!kappa.integrable_at_zero()) throw ParameterError("pair weight is not integrable on the diagonal");
  const Quad q = piecewise([&](double rho) { return kappa(rho) * lens_volume(n, r, r, rho); },
                           segments(0.0, 2.0 * r, kappa), true, true);
  const double area = sphere_area(n);
  return {area * q.value, area * q.error};
}

Quad ball_cross_pair(int n, double r1, double r2, double d, const RadialProfile& g) {
  const double reach = r1 + r2;
  if (d < reach * (1.0 - 1e-12)) throw PreconditionError("interaction requires sets with null intersection");
  d = std::max(d, reach);
  std::vector<double> kinks{std::abs(r1 - r2)};
  for (const auto& piece : g.pieces()) {
    if (piece.lo <= 0.0) continue;
    kinks.push_back(d - piece.lo);
    kinks.push_back(piece.lo - d);
  }
  const RadialProfile gt = g.times_power(1);
  auto mean_over_sphere = [&](double rho) -> Quad {
    // int_{S^{N-1}} g(|rho w + D|) dw with |D| = d
    const double a = d - rho;
    const double b = d + rho;
    if (n == 3) return {2.0 * std::numbers::pi / (rho * d) * gt.integral(a, b), 0.0};
    std::vector<double> cuts{0.0, std::numbers::pi};
    for (const auto& piece : g.pieces()) {
      if (piece.lo <= a || piece.lo >= b) continue;
      cuts.push_back(std::acos(std::clamp((d - piece.lo) / rho, -1.0, 1.0)));
    }
    std::sort(cuts.begin(), cuts.end());
    const int levels = a > 0.0 ? std::clamp(static_cast<int>(0.5 * std::log2(d / a)) + 4, kMild, kSingular) : kSingular;
    Quad q;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) continue;
      const Quad p = graded_integral(
          [&](double u) {
            const double t = d - rho * std::cos(u);
            return g(t) * t / std::sqrt((t + a) * (b + t));
          },
          cuts[i], cuts[i + 1], i == 0 ? levels : kMild, kMild, 12, 8);
      q.value += 4.0 * p.value;
      q.error += 4.0 * p.error;
    }
    return q;
  };
  // Inner errors are integrated with the same outer rule: the second pass replays them in call order.
  std::vector<double> inner_errors;
  const auto pts = segments(0.0, reach, RadialProfile::power(1.0, 0.0), kinks);
  const Quad q = piecewise(
      [&](double rho) {
        const Quad m = mean_over_sphere(rho);
        const double weight = lens_volume(n, r1, r2, rho) * std::pow(rho, n - 1);
        inner_errors.push_back(weight * m.error);
        return weight * m.value;
      },
      pts, false, true);
  std::size_t next = 0;
  const Quad e = piecewise([&](double) { return inner_errors[next++]; }, pts, false, true);
  return {q.value, q.error + std::abs(e.value)};
}

Quad ball_power_integral(int n, double r, double dc, double beta) {
  const double area = sphere_area(n);
  if (beta == 0.0) return {ball_volume(n) * std::pow(r, n), 0.0};
  if (dc <= r && beta >= n)
    throw DomainError("background integral diverges: the origin lies in the closed shape and beta >= N");
  if (dc == 0.0) return {area * std::pow(r, n - beta) / (n - beta), 0.0};
  double inside = 0.0;
  if (dc < r) inside = area * std::pow(r - dc, n - beta) / (n - beta);
  const double lo = std::abs(r - dc);
  const double hi = r + dc;
  auto fraction = [&](double t) {
    const double c = std::clamp((t * t + dc * dc - r * r) / (2.0 * t * dc), -1.0, 1.0);
    return n == 2 ? std::acos(c) / std::numbers::pi : 0.5 * (1.0 - c);
  };
  const Quad q = graded_integral([&](double t) { return std::pow(t, n - 1 - beta) * fraction(t); }, lo, hi,
                                 kSingular, kSingular);
  return {inside + area * q.value, area * q.error};
}

namespace {

void require_disjoint(const BallConfig& a, const BallConfig& b, bool same) {
  for (std::size_t i = 0; i < a.balls().size(); ++i)
    for (std::size_t j = same ? i + 1 : 0; j < b.balls().size(); ++j) {
      const auto& x = a.balls()[i];
      const auto& y = b.balls()[j];
      if (norm(x.center - y.center) < (x.radius + y.radius) * (1.0 - 1e-12))
        throw PreconditionError("balls overlap; the radial paths need disjoint balls");
    }
}

IntegralEstimate wrap(const Quad& q, std::size_t samples) {
  IntegralEstimate e;
  e.value = q.value;
  e.error = q.error;
  e.samples = samples;
  e.method = "radial-quadrature";
  return e;
}

}  // namespace

IntegralEstimate balls_complement(const BallConfig& e, const RadialProfile& k) {
  require_disjoint(e, e, true);
  const int n = e.dimension();
  Quad total;
  const auto& b = e.balls();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Quad self = ball_self_complement(n, b[i].radius, k);
    total.value += self.value;
    total.error += self.error;
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const Quad c = ball_cross_pair(n, b[i].radius, b[j].radius, norm(b[i].center - b[j].center), k);
      total.value -= 2.0 * c.value;
      total.error += 2.0 * c.error;
    }
  }
  return wrap(total, b.size());
}

IntegralEstimate balls_self_pair(const BallConfig& e, const RadialProfile& g) {
  require_disjoint(e, e, true);
  const int n = e.dimension();
  Quad total;
  const auto& b = e.balls();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Quad self = ball_self_pair(n, b[i].radius, g);
    total.value += self.value;
    total.error += self.error;
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const Quad c = ball_cross_pair(n, b[i].radius, b[j].radius, norm(b[i].center - b[j].center), g);
      total.value += 2.0 * c.value;
      total.error += 2.0 * c.error;
    }
  }
  return wrap(total, b.size());
}

IntegralEstimate balls_cross_pair(const BallConfig& u, const BallConfig& w, const RadialProfile& g) {
  require_disjoint(u, w, false);
  Quad total;
  for (const auto& x : u.balls())
    for (const auto& y : w.balls()) {
      const Quad c = ball_cross_pair(u.dimension(), x.radius, y.radius, norm(x.center - y.center), g);
      total.value += c.value;
      total.error += c.error;
    }
  return wrap(total, u.balls().size() * w.balls().size());
}

IntegralEstimate balls_background(const BallConfig& e, double beta) {
  require_disjoint(e, e, true);
  Quad total;
  for (const auto& b : e.balls()) {
    const Quad q = ball_power_integral(e.dimension(), b.radius, norm(b.center), beta);
    total.value += q.value;
    total.error += q.error;
  }
  return wrap(total, e.balls().size());
}

}  // namespace droplab
