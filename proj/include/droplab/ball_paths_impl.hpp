#pragma once

#include <cmath>

#include "droplab/gauss.hpp"

namespace droplab {

namespace detail {

template <class F>
Quad gauss_pair(F& f, double a, double b, int order, int low) {
  const double fine = integrate_gauss(f, a, b, order);
  return {fine, std::abs(fine - integrate_gauss(f, a, b, low))};
}

// Panels [a + w 2^{-k-1}, a + w 2^{-k}] for k < levels (w = half width), toward `a` when toward_lo.
template <class F>
Quad graded_half(F& f, double a, double b, int levels, bool toward_lo, int order, int low) {
  Quad q;
  const double w = b - a;
  if (levels <= 0) {
    const Quad p = gauss_pair(f, a, b, order, low);
    return p;
  }
  double prev = 0.0, last = 0.0;
  for (int k = 0; k < levels; ++k) {
    const double outer = w * std::ldexp(1.0, -k);
    const double inner = w * std::ldexp(1.0, -k - 1);
    const Quad p = toward_lo ? gauss_pair(f, a + inner, a + outer, order, low)
                             : gauss_pair(f, b - outer, b - inner, order, low);
    q.value += p.value;
    q.error += p.error;
    prev = last;
    last = p.value;
  }
  // Remaining sliver. Deep grading means an endpoint singularity: panel integrals of a power law
  // decay geometrically and the series is exact for a pure power. Shallow grading means a smooth
  // end, where plain Gauss on the sliver is accurate.
  const double ratio = prev != 0.0 ? last / prev : 0.0;
  const Quad rest = toward_lo ? gauss_pair(f, a, a + w * std::ldexp(1.0, -levels), order, low)
                              : gauss_pair(f, b - w * std::ldexp(1.0, -levels), b, order, low);
  const bool series = levels >= 20 && ratio > 0.0 && ratio < 1.0;
  const double tail = series ? last * ratio / (1.0 - ratio) : rest.value;
  q.error += std::isfinite(rest.value) ? std::abs(tail - rest.value) : std::abs(tail);
  q.value += tail;
  return q;
}

}  // namespace detail

template <class F>
Quad graded_integral(F&& f, double a, double b, int levels_a, int levels_b, int order, int low) {
  if (!(b > a)) return {};
  const double mid = 0.5 * (a + b);
  const Quad left = detail::graded_half(f, a, mid, levels_a, true, order, low);
  const Quad right = detail::graded_half(f, mid, b, levels_b, false, order, low);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace droplab
