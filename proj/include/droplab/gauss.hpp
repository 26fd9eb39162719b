#pragma once

#include <vector>

namespace droplab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (thread-safe).
const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
template <class F>
double integrate_gauss(F&& f, double a, double b, int order, int panels = 1) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double half = 0.5 * width;
    const double mid = lo + half;
    double part = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) part += rule.weights[i] * f(mid + half * rule.nodes[i]);
    sum += half * part;
  }
  return sum;
}

}  // namespace droplab
