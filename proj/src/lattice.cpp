#include "droplab/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "droplab/errors.hpp"
#include "droplab/gauss.hpp"

namespace droplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Radial integral int_0^inf kappa(rho) T(rho w) drho along a unit direction w, with
// T = tent centred at o (plain) or T = 1 - tent centred at 0 (complement). Both are
// polynomial in rho between kinks, so each segment is a sum of exact power integrals.
double radial_tent(const RadialProfile& kappa, int n, const double* w, const int* o, bool complement) {
  double lo = 0.0;
  double hi = kInf;
  for (int k = 0; k < n; ++k) {
    if (std::abs(w[k]) < 1e-15) {
      if (std::abs(o[k]) >= 1) return 0.0;
      continue;
    }
    const double t1 = (o[k] - 1) / w[k];
    const double t2 = (o[k] + 1) / w[k];
    lo = std::max(lo, std::min(t1, t2));
    hi = std::min(hi, std::max(t1, t2));
  }
  double tail = 0.0;
  if (complement) {
    tail = kappa.tail(hi);
  } else if (!(hi > lo)) {
    return 0.0;
  }
  std::vector<double> breaks{lo, hi};
  for (int k = 0; k < n; ++k) {
    if (std::abs(w[k]) < 1e-15) continue;
    const double t = o[k] / w[k];
    if (t > lo && t < hi) breaks.push_back(t);
  }
  for (const auto& p : kappa.pieces())
    if (p.lo > lo && p.lo < hi) breaks.push_back(p.lo);
  std::sort(breaks.begin(), breaks.end());

  double sum = 0.0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double p = breaks[b];
    const double q = breaks[b + 1];
    if (!(q > p)) continue;
    const double m = 0.5 * (p + q);
    double c[4] = {1.0, 0.0, 0.0, 0.0};
    int degree = 0;
    for (int k = 0; k < n; ++k) {
      double a, s;
      if (std::abs(w[k]) < 1e-15) {
        a = 1.0 - std::abs(o[k]);
        s = 0.0;
      } else {
        const double sigma = m * w[k] - o[k] >= 0.0 ? 1.0 : -1.0;
        a = 1.0 + sigma * o[k];
        s = -sigma * w[k];
      }
      for (int j = degree + 1; j >= 1; --j) c[j] = c[j] * a + c[j - 1] * s;
      c[0] *= a;
      ++degree;
    }
    if (complement) {
      for (int j = 0; j <= degree; ++j) c[j] = -c[j];
      c[0] += 1.0;
    }
    const auto& piece = kappa.pieces()[kappa.locate(m)];
    for (int j = 0; j <= degree; ++j) {
      if (c[j] == 0.0) continue;
      sum += c[j] * (power_antiderivative(piece.coef, piece.expo + j, q) -
                     power_antiderivative(piece.coef, piece.expo + j, p));
    }
  }
  return sum + tail;
}

// Angular quadrature of radial_tent for offsets touching the origin cell.
struct Pair {
  double value;
  double error;
};

Pair polar_weight(const RadialProfile& kappa, int n, const int* o, bool complement) {
  if (n == 2) {
    std::vector<double> angles{0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi,
                               2.0 * std::numbers::pi};
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        const double x = o[0] + a;
        const double y = o[1] + b;
        if (x == 0.0 && y == 0.0) continue;
        double t = std::atan2(y, x);
        if (t < 0.0) t += 2.0 * std::numbers::pi;
        angles.push_back(t);
      }
    std::sort(angles.begin(), angles.end());
    auto run = [&](int order) {
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
        if (!(angles[i + 1] - angles[i] > 1e-14)) continue;
        sum += integrate_gauss(
            [&](double t) {
              const double w[2] = {std::cos(t), std::sin(t)};
              return radial_tent(kappa, 2, w, o, complement);
            },
            angles[i], angles[i + 1], order);
      }
      return sum;
    };
    const double fine = run(20);
    return {fine, std::abs(fine - run(12))};
  }
  // N = 3: gnomonic cube faces, omega = (sigma e_a + u e_b + v e_c) / sqrt(1 + u^2 + v^2).
  auto run = [&](int order, int split) {
    double sum = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int sigma = -1; sigma <= 1; sigma += 2) {
        const int b = (a + 1) % 3;
        const int c = (a + 2) % 3;
        std::vector<double> us{-1.0, 0.0, 1.0};
        std::vector<double> vs{-1.0, 0.0, 1.0};
        for (int x = -1; x <= 1; ++x)
          for (int y = -1; y <= 1; ++y)
            for (int z = -1; z <= 1; ++z) {
              const int corner[3] = {o[0] + x, o[1] + y, o[2] + z};
              const double pa = sigma * corner[a];
              if (pa <= 0.0) continue;
              const double u = corner[b] / pa;
              const double v = corner[c] / pa;
              if (std::abs(u) < 1.0) us.push_back(u);
              if (std::abs(v) < 1.0) vs.push_back(v);
            }
        std::sort(us.begin(), us.end());
        us.erase(std::unique(us.begin(), us.end()), us.end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        for (std::size_t i = 0; i + 1 < us.size(); ++i)
          for (std::size_t j = 0; j + 1 < vs.size(); ++j) {
            const double u0 = us[i], u1 = us[i + 1], v0 = vs[j], v1 = vs[j + 1];
            const double du = (u1 - u0) / split, dv = (v1 - v0) / split;
            for (int pi = 0; pi < split; ++pi)
              for (int pj = 0; pj < split; ++pj) {
                sum += integrate_gauss(
                    [&](double u) {
                      return integrate_gauss(
                          [&](double v) {
                            const double r = std::sqrt(1.0 + u * u + v * v);
                            double w[3];
                            w[a] = sigma / r;
                            w[b] = u / r;
                            w[c] = v / r;
                            return radial_tent(kappa, 3, w, o, complement) / (r * r * r);
                          },
                          v0 + pj * dv, v0 + (pj + 1) * dv, order);
                    },
                    u0 + pi * du, u0 + (pi + 1) * du, order);
              }
          }
      }
    return sum;
  };
  const double fine = run(8, 4);
  return {fine, std::abs(fine - run(6, 2))};
}

// Tensor Gauss over the 2^N half-cells of the tent support, for offsets away from the origin.
Pair tensor_weight(const RadialProfile& g, int n, const int* o) {
  const int inf_norm = std::max({std::abs(o[0]), std::abs(o[1]), n == 3 ? std::abs(o[2]) : 0});
  const int q = inf_norm <= 2 ? 10 : inf_norm <= 5 ? 6 : inf_norm <= 12 ? 4 : 3;
  auto run = [&](int order) {
    const GaussRule& rule = gauss_legendre(order);
    std::vector<double> t, wt;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = 0.5 * (rule.nodes[i] + 1.0);
      t.push_back(x);
      wt.push_back(0.5 * rule.weights[i] * (1.0 - x));
    }
    const std::size_t m = t.size();
    double sum = 0.0;
    const int zs = n == 3 ? 2 : 1;
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2)
        for (int szi = 0; szi < zs; ++szi) {
          const int sz = szi == 0 ? -1 : 1;
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
              const double x = o[0] + sx * t[i];
              const double y = o[1] + sy * t[j];
              if (n == 2) {
                sum += wt[i] * wt[j] * g(std::sqrt(x * x + y * y));
                continue;
              }
              for (std::size_t k = 0; k < m; ++k) {
                const double z = o[2] + sz * t[k];
                sum += wt[i] * wt[j] * wt[k] * g(std::sqrt(x * x + y * y + z * z));
              }
            }
        }
    return sum;
  };
  const double fine = run(q);
  return {fine, std::abs(fine - run(q - 1))};
}

}  // namespace

LatticeWeights::LatticeWeights(const RadialProfile& g, int dimension, double spacing, std::array<int, 3> extent,
                               bool complement)
    : dimension_(dimension), extent_(extent) {
  if (dimension != 2 && dimension != 3) throw ParameterError("lattice weights supported for N = 2, 3");
  if (dimension == 2) extent_[2] = 0;
  const RadialProfile unit = g.dilated(spacing);
  const RadialProfile kappa = unit.times_power(dimension - 1);
  const double scale = std::pow(spacing, 2 * dimension);
  w_.assign(static_cast<std::size_t>(extent_[0] + 1) * (extent_[1] + 1) * (extent_[2] + 1), 0.0);
  e_.assign(w_.size(), 0.0);
  std::map<std::array<int, 3>, Pair> memo;
  for (int c = 0; c <= extent_[2]; ++c)
    for (int b = 0; b <= extent_[1]; ++b)
      for (int a = 0; a <= extent_[0]; ++a) {
        std::array<int, 3> key{a, b, c};
        std::sort(key.begin(), key.begin() + dimension);
        auto it = memo.find(key);
        if (it == memo.end()) {
          const int o[3] = {key[0], key[1], key[2]};
          const int inf_norm = *std::max_element(key.begin(), key.begin() + dimension);
          Pair p = inf_norm <= 1 ? polar_weight(kappa, dimension, o, false) : tensor_weight(unit, dimension, o);
          it = memo.emplace(key, Pair{p.value * scale, p.error * scale}).first;
        }
        const std::size_t s = slot(a, b, c);
        w_[s] = it->second.value;
        e_[s] = it->second.error;
      }
  if (complement) {
    const int zero[3] = {0, 0, 0};
    const Pair p = polar_weight(kappa, dimension, zero, true);
    cell_complement_ = p.value * scale;
    cell_complement_error_ = p.error * scale;
  }
}

std::size_t LatticeWeights::slot(int a, int b, int c) const {
  a = std::abs(a);
  b = std::abs(b);
  c = std::abs(c);
  if (a > extent_[0] || b > extent_[1] || c > extent_[2]) throw NumericalError("lattice offset outside weight table");
  return (static_cast<std::size_t>(c) * (extent_[1] + 1) + b) * (extent_[0] + 1) + a;
}

std::shared_ptr<const LatticeWeights> lattice_weights(const RadialProfile& g, int dimension, double spacing,
                                                      std::array<int, 3> extent, bool complement) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const LatticeWeights>> cache;
  char buf[64];
  std::snprintf(buf, sizeof buf, "|%d|%a|%d", dimension, spacing, complement ? 1 : 0);
  const std::string key = g.fingerprint() + buf;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) {
    const auto& have = it->second->extent();
    bool covers = true;
    for (int k = 0; k < dimension; ++k) covers = covers && have[k] >= extent[k];
    if (covers) return it->second;
    for (int k = 0; k < 3; ++k) extent[k] = std::max(extent[k], have[k]);
  }
  auto table = std::make_shared<const LatticeWeights>(g, dimension, spacing, extent, complement);
  if (cache.size() > 64) cache.clear();
  cache[key] = table;
  return table;
}

Correlation::Correlation(const VoxelShape& a, const VoxelShape& b) : dims_(a.dims()) {
  if (a.dims() != b.dims()) throw ParameterError("correlation needs grids of equal dimensions");
  const int n = a.dimension();
  for (int k = 0; k < 3; ++k) padded_[k] = k < n ? 2 * dims_[k] : 1;
  const std::size_t total = static_cast<std::size_t>(padded_[0]) * padded_[1] * padded_[2];
  const int half0 = padded_[0] / 2 + 1;
  const std::size_t ctotal = static_cast<std::size_t>(half0) * padded_[1] * padded_[2];

  static std::mutex planner;  // FFTW planning is not thread-safe
  double* ra = fftw_alloc_real(total);
  double* rb = fftw_alloc_real(total);
  fftw_complex* ca = fftw_alloc_complex(ctotal);
  fftw_complex* cb = fftw_alloc_complex(ctotal);
  fftw_plan fa, fb, back;
  int shape[3];
  if (n == 2) {
    shape[0] = padded_[1];
    shape[1] = padded_[0];
  } else {
    shape[0] = padded_[2];
    shape[1] = padded_[1];
    shape[2] = padded_[0];
  }
  {
    std::lock_guard<std::mutex> lock(planner);
    fa = fftw_plan_dft_r2c(n, shape, ra, ca, FFTW_ESTIMATE);
    fb = fftw_plan_dft_r2c(n, shape, rb, cb, FFTW_ESTIMATE);
    back = fftw_plan_dft_c2r(n, shape, ca, ra, FFTW_ESTIMATE);
  }
  std::fill(ra, ra + total, 0.0);
  std::fill(rb, rb + total, 0.0);
  for (int k = 0; k < dims_[2]; ++k)
    for (int j = 0; j < dims_[1]; ++j)
      for (int i = 0; i < dims_[0]; ++i) {
        const std::size_t dst = (static_cast<std::size_t>(k) * padded_[1] + j) * padded_[0] + i;
        ra[dst] = a.at(i, j, k) ? 1.0 : 0.0;
        rb[dst] = b.at(i, j, k) ? 1.0 : 0.0;
      }
  fftw_execute(fa);
  fftw_execute(fb);
  for (std::size_t i = 0; i < ctotal; ++i) {
    // conj(A) * B
    const double re = ca[i][0] * cb[i][0] + ca[i][1] * cb[i][1];
    const double im = ca[i][0] * cb[i][1] - ca[i][1] * cb[i][0];
    ca[i][0] = re;
    ca[i][1] = im;
  }
  fftw_execute(back);
  values_.resize(total);
  for (std::size_t i = 0; i < total; ++i) values_[i] = std::round(ra[i] / static_cast<double>(total));
  {
    std::lock_guard<std::mutex> lock(planner);
    fftw_destroy_plan(fa);
    fftw_destroy_plan(fb);
    fftw_destroy_plan(back);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
}

double Correlation::at(int a, int b, int c) const {
  if (std::abs(a) >= dims_[0] || std::abs(b) >= dims_[1] || std::abs(c) >= dims_[2]) return 0.0;
  auto wrap = [](int x, int p) { return x < 0 ? x + p : x; };
  const std::size_t idx =
      (static_cast<std::size_t>(wrap(c, padded_[2])) * padded_[1] + wrap(b, padded_[1])) * padded_[0] +
      wrap(a, padded_[0]);
  return values_[idx];
}

namespace {

std::array<int, 3> table_extent(const VoxelShape& v) {
  return {v.dims()[0] - 1, v.dims()[1] - 1, v.dimension() == 3 ? v.dims()[2] - 1 : 0};
}

template <class F>
void for_each_offset(const std::array<int, 3>& ext, F&& f) {
  for (int c = -ext[2]; c <= ext[2]; ++c)
    for (int b = -ext[1]; b <= ext[1]; ++b)
      for (int a = -ext[0]; a <= ext[0]; ++a) f(a, b, c);
}

}  // namespace

IntegralEstimate lattice_complement(const VoxelShape& e, const RadialProfile& k) {
  IntegralEstimate est;
  est.method = "lattice";
  est.samples = e.count();
  if (e.count() == 0) return est;
  const auto ext = table_extent(e);
  const auto weights = lattice_weights(k, e.dimension(), e.spacing(), ext, true);
  const Correlation corr(e, e);
  const double n = static_cast<double>(e.count());
  double value = n * weights->cell_complement();
  double error = n * weights->cell_complement_error();
  for_each_offset(ext, [&](int a, int b, int c) {
    if (a == 0 && b == 0 && c == 0) return;
    const double x = corr.at(a, b, c);
    if (x == 0.0) return;
    value -= weights->weight(a, b, c) * x;
    error += weights->error(a, b, c) * x;
  });
  est.value = value;
  est.error = error;
  return est;
}

IntegralEstimate lattice_pair(const VoxelShape& u, const VoxelShape& w, const RadialProfile& g) {
  if (!same_lattice(u, w) || u.dims() != w.dims()) throw ParameterError("lattice pair integrals need a shared grid");
  IntegralEstimate est;
  est.method = "lattice";
  est.samples = u.count() + w.count();
  if (u.count() == 0 || w.count() == 0) return est;
  const auto ext = table_extent(u);
  const Correlation corr(u, w);
  if (corr.at(0, 0, 0) > 0.0 && !g.times_power(u.dimension() - 1).integrable_at_zero())
    throw PreconditionError("interaction requires sets with null intersection");
  const auto weights = lattice_weights(g, u.dimension(), u.spacing(), ext, false);
  double value = 0.0;
  double error = 0.0;
  for_each_offset(ext, [&](int a, int b, int c) {
    const double x = corr.at(a, b, c);
    if (x == 0.0) return;
    value += weights->weight(a, b, c) * x;
    error += weights->error(a, b, c) * x;
  });
  est.value = value;
  est.error = error;
  return est;
}

namespace {

void box_recursive(const Vec& lo, const Vec& hi, int n, double beta, int depth, BoxIntegral& acc);

// int over the box of |x|^{-beta}, where every degenerate axis is fixed at its coordinate.
void box_leaf(const Vec& lo, const Vec& hi, int n, double beta, BoxIntegral& acc) {
  auto run = [&](int order) {
    const GaussRule& rule = gauss_legendre(order);
    const int q = static_cast<int>(rule.nodes.size());
    int active[3];
    int m = 0;
    for (int k = 0; k < n; ++k)
      if (hi[k] > lo[k]) active[m++] = k;
    std::size_t total = 1;
    for (int i = 0; i < m; ++i) total *= q;
    double sum = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
      Vec x = lo;
      double weight = 1.0;
      std::size_t rest = idx;
      for (int i = 0; i < m; ++i) {
        const int node = static_cast<int>(rest % q);
        rest /= q;
        const int k = active[i];
        const double half = 0.5 * (hi[k] - lo[k]);
        x[k] = lo[k] + half * (1.0 + rule.nodes[node]);
        weight *= half * rule.weights[node];
      }
      sum += weight * std::pow(norm(x), -beta);
    }
    return sum;
  };
  const double fine = run(4);
  acc.value += fine;
  acc.error += std::abs(fine - run(3));
}

void box_recursive(const Vec& lo, const Vec& hi, int n, double beta, int depth, BoxIntegral& acc) {
  int m = 0;
  double diam2 = 0.0, dist2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = hi[k] - lo[k];
    if (w > 0.0) ++m;
    diam2 += w * w;
    const double gap = std::max({lo[k], -hi[k], 0.0});
    dist2 += gap * gap;
  }
  if (dist2 == 0.0) {
    // Origin in the closed box: x . grad|x|^{-beta} identity turns the volume integral into faces.
    if (beta >= m) {
      acc.singular = true;
      return;
    }
    BoxIntegral faces;
    for (int k = 0; k < n; ++k) {
      if (!(hi[k] > lo[k])) continue;
      for (int side = 0; side < 2; ++side) {
        const double x = side == 0 ? hi[k] : lo[k];
        const double lever = side == 0 ? hi[k] : -lo[k];
        if (lever <= 0.0) continue;
        Vec flo = lo, fhi = hi;
        flo[k] = x;
        fhi[k] = x;
        BoxIntegral part;
        box_recursive(flo, fhi, n, beta, depth + 1, part);
        faces.value += lever * part.value;
        faces.error += lever * part.error;
      }
    }
    acc.value += faces.value / (m - beta);
    acc.error += faces.error / (m - beta);
    return;
  }
  if (dist2 >= diam2 || depth >= 40) {
    box_leaf(lo, hi, n, beta, acc);
    return;
  }
  const Vec mid = (lo + hi) * 0.5;
  const int children = 1 << n;
  for (int mask = 0; mask < children; ++mask) {
    Vec clo = lo, chi = hi;
    bool skip = false;
    for (int k = 0; k < n; ++k) {
      const bool upper = (mask >> k) & 1;
      if (!(hi[k] > lo[k])) {
        if (upper) skip = true;
        continue;
      }
      if (upper) clo[k] = mid[k];
      else chi[k] = mid[k];
    }
    if (!skip) box_recursive(clo, chi, n, beta, depth + 1, acc);
  }
}

}  // namespace

BoxIntegral box_power_integral(const Vec& lo, const Vec& hi, int dimension, double beta) {
  BoxIntegral acc;
  if (beta == 0.0) {
    double v = 1.0;
    for (int k = 0; k < dimension; ++k)
      if (hi[k] > lo[k]) v *= hi[k] - lo[k];
    acc.value = v;
    return acc;
  }
  box_recursive(lo, hi, dimension, beta, 0, acc);
  return acc;
}

IntegralEstimate lattice_background(const VoxelShape& e, double beta) {
  IntegralEstimate est;
  est.method = "lattice";
  est.samples = e.count();
  const double h = e.spacing();
  std::size_t skipped = 0;
  for (std::size_t idx = 0; idx < e.size(); ++idx) {
    if (!e.at_index(idx)) continue;
    const auto c = e.coords(idx);
    Vec lo = e.origin();
    for (int k = 0; k < e.dimension(); ++k) lo[k] += c[k] * h;
    Vec hi = lo;
    for (int k = 0; k < e.dimension(); ++k) hi[k] += h;
    const BoxIntegral b = box_power_integral(lo, hi, e.dimension(), beta);
    if (b.singular) {
      ++skipped;
      continue;
    }
    est.value += b.value;
    est.error += b.error;
  }
  if (skipped > 0)
    est.warnings.push_back("background: " + std::to_string(skipped) +
                           " singular cell(s) at the origin excluded; the value is a lower bound (beta >= N)");
  return est;
}

}  // namespace droplab
