#include "droplab/chord.hpp"

#include <cmath>
#include <limits>

#include "droplab/constants.hpp"
#include "droplab/errors.hpp"

namespace droplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_{[a,b]} int_{[c,d]} kappa(|u - t|) for two disjoint intervals in either order.
double ordered_pair(const LineKernel& k, const Interval& x, const Interval& y) {
  if (x.hi <= y.lo) return k.pair(x.lo, x.hi, y.lo, y.hi);
  return k.pair(-x.hi, -x.lo, -y.hi, -y.lo);
}

}  // namespace

double line_complement_sum(const LineKernel& kappa, const Intervals& a) {
  if (a.empty()) return 0.0;
  Intervals gaps;
  gaps.push_back({-kInf, a.front().lo});
  for (std::size_t i = 1; i < a.size(); ++i) gaps.push_back({a[i - 1].hi, a[i].lo});
  gaps.push_back({a.back().hi, kInf});
  double sum = 0.0;
  for (const auto& x : a)
    for (const auto& g : gaps) {
      if (g.hi <= g.lo) continue;
      sum += ordered_pair(kappa, x, g);
    }
  return sum;
}

double line_self_sum(const LineKernel& kappa, const Intervals& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += 2.0 * kappa.self(a[i].lo, a[i].hi);
    for (std::size_t j = i + 1; j < a.size(); ++j) sum += 2.0 * kappa.pair(a[i].lo, a[i].hi, a[j].lo, a[j].hi);
  }
  return sum;
}

double line_cross_sum(const LineKernel& kappa, const Intervals& a, const Intervals& b) {
  double sum = 0.0;
  for (const auto& x : a)
    for (const auto& y : b) {
      const double overlap = std::min(x.hi, y.hi) - std::max(x.lo, y.lo);
      if (overlap > 1e-9 * std::max({1.0, std::abs(x.lo), std::abs(y.hi)}))
        throw PreconditionError("interaction requires sets with null intersection");
      if (x.hi <= y.lo || y.hi <= x.lo) {
        sum += ordered_pair(kappa, x, y);
      } else if (x.lo < y.lo) {
        sum += kappa.pair(x.lo, std::min(x.hi, y.lo), y.lo, y.hi);
      } else {
        sum += kappa.pair(y.lo, std::min(y.hi, x.lo), x.lo, x.hi);
      }
    }
  return sum;
}

LineKernel line_density(const RadialProfile& g, int dimension) { return LineKernel(g.times_power(dimension - 1)); }

IntegralEstimate chord_complement(const Shape& e, const RadialProfile& k, const QuadratureSpec& spec) {
  const LineKernel kappa = line_density(k, e.dimension());
  if (!kappa.tail_normalized()) throw ParameterError("kernel tail is not integrable; the perimeter diverges");
  return chord_estimate(e.dimension(), e.frame(), spec.budget, spec.seed, [&](const Vec& o, const Vec& d) {
    return line_complement_sum(kappa, e.line_intervals(o, d));
  });
}

IntegralEstimate chord_self(const Shape& e, const RadialProfile& g, const QuadratureSpec& spec) {
  const LineKernel kappa = line_density(g, e.dimension());
  if (!kappa.density().integrable_at_zero()) throw ParameterError("pair weight is not integrable on the diagonal");
  return chord_estimate(e.dimension(), e.frame(), spec.budget, spec.seed, [&](const Vec& o, const Vec& d) {
    return line_self_sum(kappa, e.line_intervals(o, d));
  });
}

IntegralEstimate chord_cross(const Shape& u, const Shape& w, const RadialProfile& g, const QuadratureSpec& spec) {
  const LineKernel kappa = line_density(g, u.dimension());
  const Frame frame = enclosing_frame(u.frame(), w.frame());
  return chord_estimate(u.dimension(), frame, spec.budget, spec.seed, [&](const Vec& o, const Vec& d) {
    const auto a = u.line_intervals(o, d);
    if (a.empty()) return 0.0;
    return line_cross_sum(kappa, a, w.line_intervals(o, d));
  });
}

double ray_power_integral(const Intervals& iv, double expo) {
  double sum = 0.0;
  for (const auto& i : iv) {
    if (i.hi <= 0.0) continue;
    const double lo = std::max(0.0, i.lo);
    if (lo == 0.0 && expo <= -1.0) throw DomainError("background integral diverges: origin lies in the shape and beta >= N");
    sum += power_antiderivative(1.0, expo, i.hi) - power_antiderivative(1.0, expo, lo);
  }
  return sum;
}

IntegralEstimate ray_background(const Shape& e, double beta, const QuadratureSpec& spec) {
  const int n = e.dimension();
  const double expo = n - 1 - beta;
  IntegralEstimate est;
  est.seed = spec.seed;
  if (e.trivially_empty()) {
    est.method = "exact";
    return est;
  }
  if (spec.method == QuadratureMethod::tensor_midpoint) {
    // Midpoint rule in angle at the budget and at a quarter of it; the difference is the error proxy.
    auto run = [&](std::size_t budget) {
      const auto grid = sphere_midpoint_grid(n, budget);
      double sum = 0.0;
      for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        sum += grid.weights[i] * ray_power_integral(e.line_intervals(Vec(), grid.nodes[i]), expo);
      return std::pair{sum, grid.nodes.size()};
    };
    const auto fine = run(spec.budget);
    const auto coarse = run(std::max<std::size_t>(spec.budget / 4, 16));
    est.method = "tensor-midpoint/rays";
    est.value = fine.first;
    est.error = std::abs(fine.first - coarse.first);
    est.samples = fine.second;
    return est;
  }
  Rng rng(spec.seed);
  Accumulator acc;
  for (std::size_t i = 0; i < spec.budget; ++i) {
    const Vec d = random_direction(n, rng);
    acc.add(ray_power_integral(e.line_intervals(Vec(), d), expo));
  }
  const double area = sphere_area(n);
  est.method = "monte-carlo/rays";
  est.value = area * acc.mean();
  est.error = area * acc.stderr_of_mean();
  est.samples = spec.budget;
  return est;
}

}  // namespace droplab
