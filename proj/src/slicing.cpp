#include "droplab/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "droplab/chord.hpp"
#include "droplab/constants.hpp"
#include "droplab/errors.hpp"
#include "droplab/sampling.hpp"
#include "droplab/thresholds.hpp"

namespace droplab {

namespace {

Vec checked_direction(const Vec& nu, int n) {
  const double len = norm(nu);
  if (!(std::abs(len - 1.0) <= 1e-6)) throw ParameterError("cut direction must be a unit vector");
  for (int k = n; k < 3; ++k)
    if (nu[k] != 0.0) throw ParameterError("cut direction has components beyond the dimension");
  return nu * (1.0 / len);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  if (n <= 1) {
    out.push_back(0.5 * (a + b));
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

/// Trapezoid weights of a sorted node list (a single node gets weight 0).
std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double h = 0.5 * (x[i] - x[i - 1]);
    w[i - 1] += h;
    w[i] += h;
  }
  return w;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  const auto w = trapezoid_weights(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * y[i];
  return sum;
}

SliceDefectRecord cut_terms(const Shape& e, const Vec& nu_in, double l, const EnergyParams& params,
                            const QuadratureSpec& spec, bool a_on_plus) {
  params.validate();
  const int n = e.dimension();
  if (n != params.dimension()) throw ParameterError("shape and kernel dimensions differ");
  const Vec nu = checked_direction(nu_in, n);
  const Kernel kernel(params.kernel);
  SliceDefectRecord r;
  r.nu = nu;
  r.l = l;
  const auto [plus, minus] = slice(e, Halfspace(nu, l));
  r.plus_volume = volume(plus);
  r.minus_volume = volume(minus);
  r.lhs = radial_cross_integral(plus, minus, RadialProfile::power(1.0, -params.alpha), spec.with_stream(1));
  r.kernel_cross = radial_cross_integral(plus, minus, kernel.profile(), spec.with_stream(2));
  r.background = params.A > 0.0 ? power_integral(a_on_plus ? plus : minus, params.beta, spec.with_stream(3))
                                : exact_zero();
  r.rhs = 2.0 * r.kernel_cross.value + params.A * r.background.value;
  r.defect = r.rhs - r.lhs.value;
  r.lhs_error = r.lhs.error;
  r.rhs_error = std::hypot(2.0 * r.kernel_cross.error, params.A * r.background.error);
  r.defect_error = std::hypot(r.lhs_error, r.rhs_error);
  return r;
}

double sphere_weight(int n, std::size_t count) { return sphere_area(n) / static_cast<double>(count); }

}  // namespace

SliceDefectRecord splitting_defect(const Shape& e, const Vec& nu, double l, const EnergyParams& params,
                                   const QuadratureSpec& spec) {
  return cut_terms(e, nu, l, params, spec, false);
}

std::pair<double, double> extent(const Shape& e, const Vec& nu) {
  if (e.trivially_empty()) return {0.0, 0.0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (e.is_balls()) {
    for (const auto& b : e.balls().balls()) {
      const double c = dot(b.center, nu);
      lo = std::min(lo, c - b.radius * norm(nu));
      hi = std::max(hi, c + b.radius * norm(nu));
    }
    return {lo, hi};
  }
  const auto& v = e.voxels();
  const double half = 0.5 * v.spacing() * (std::abs(nu[0]) + std::abs(nu[1]) + std::abs(nu[2]));
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (!v.at_index(idx)) continue;
    const auto c = v.coords(idx);
    const double h = dot(v.cell_center(c[0], c[1], c[2]), nu);
    lo = std::min(lo, h - half);
    hi = std::max(hi, h + half);
  }
  return {lo, hi};
}

std::vector<Vec> default_directions(int n, int count) {
  if (n != 2 && n != 3) throw ParameterError("direction grids support dimensions 2 and 3");
  if (count <= 0) count = n == 2 ? 16 : 64;
  std::vector<Vec> out;
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      out.emplace_back(std::cos(t), std::sin(t));
    }
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    out.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return out;
}

std::vector<double> offset_grid(const Shape& e, const Vec& nu, const SliceGrid& grid) {
  if (!grid.offsets.empty()) {
    auto out = grid.offsets;
    std::sort(out.begin(), out.end());
    return out;
  }
  if (grid.offset_points < 1) throw ParameterError("offset grid needs at least one point");
  const auto [lo, hi] = extent(e, nu);
  const double pad = 0.5 * grid.padding * (hi - lo);
  return linspace(lo - pad, hi + pad, grid.offset_points);
}

ScanResult scan(const Shape& e, const EnergyParams& params, const SliceGrid& grid, const QuadratureSpec& spec) {
  spec.validate();
  const auto dirs = grid.directions.empty() ? default_directions(e.dimension()) : grid.directions;
  if (dirs.empty()) throw ParameterError("direction grid is empty");
  ScanResult out;
  std::size_t cell = 0;
  for (const auto& nu_in : dirs) {
    const Vec nu = checked_direction(nu_in, e.dimension());
    const auto ls = offset_grid(e, nu, grid);
    const auto w = trapezoid_weights(ls);
    DirectionSummary sum;
    sum.nu = nu;
    double var = 0.0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      // cell 0 keeps the base seed so that a one-point scan reproduces splitting_defect
      const QuadratureSpec cell_spec = cell == 0 ? spec : spec.with_stream(cell);
      ++cell;
      auto rec = splitting_defect(e, nu, ls[i], params, cell_spec);
      sum.integrated_defect += w[i] * rec.defect;
      sum.integrated_lhs += w[i] * rec.lhs.value;
      sum.integrated_rhs += w[i] * rec.rhs;
      var += w[i] * w[i] * rec.defect_error * rec.defect_error;
      out.records.push_back(std::move(rec));
    }
    sum.integrated_error = std::sqrt(var);
    out.directions.push_back(sum);
  }
  for (std::size_t i = 1; i < out.records.size(); ++i)
    if (out.records[i].defect < out.records[out.min_index].defect) out.min_index = i;
  return out;
}

double sphere_positive_integral(const Vec& x, int n) {
  if (n != 2 && n != 3) throw ParameterError("sphere integral supports dimensions 2 and 3");
  return equator_area(n) * norm(x) / (n - 1);
}

double sphere_positive_integral_uncorrected(const Vec& x, int n) {
  if (n != 2 && n != 3) throw ParameterError("sphere integral supports dimensions 2 and 3");
  return equator_area(n) * norm(x);
}

SphereIntegralCheck sphere_integral_check(const Vec& x, int n, const QuadratureSpec& spec) {
  SphereIntegralCheck c;
  c.x = x;
  c.closed_form = sphere_positive_integral(x, n);
  c.uncorrected = sphere_positive_integral_uncorrected(x, n);
  c.numeric = sphere_average([&](const Vec& nu) { return std::max(0.0, dot(x, nu)); }, n, spec);
  c.relative_deviation = c.closed_form > 0.0 ? std::abs(c.numeric.value - c.closed_form) / c.closed_form
                                             : std::abs(c.numeric.value);
  return c;
}

LayerCakeReport layer_cake_checks(const Shape& e, const Vec& nu_in, const QuadratureSpec& spec, int points) {
  spec.validate();
  if (points < 4) throw ParameterError("layer-cake checks need at least 4 offset points");
  const int n = e.dimension();
  const Vec nu = checked_direction(nu_in, n);
  LayerCakeReport rep;
  rep.nu = nu;
  rep.offset_points = points;
  if (e.trivially_empty()) return rep;
  const auto [lo, hi] = extent(e, nu);
  const auto fine = linspace(lo, hi, points);
  const auto coarse = linspace(lo, hi, points / 2);
  const auto fine_minus = linspace(std::min(lo, 0.0), 0.0, points);
  const auto coarse_minus = linspace(std::min(lo, 0.0), 0.0, points / 2);

  // First identity along rays from the origin: x = r theta, c = theta . nu < 0.
  struct RayValues {
    double layered, layered_coarse, direct;
  };
  auto ray = [&](const Vec& theta) -> RayValues {
    const double c = dot(theta, nu);
    if (c >= 0.0 || lo >= 0.0) return {0.0, 0.0, 0.0};
    const Intervals iv = e.line_intervals(Vec(), theta);
    auto minus_part = [&](double l) {
      const double r0 = l / c;
      Intervals clip;
      for (const auto& i : iv)
        if (i.hi > r0) clip.push_back({std::max(i.lo, r0), i.hi});
      return ray_power_integral(clip, n - 2);
    };
    auto layered = [&](const std::vector<double>& ls) {
      std::vector<double> y;
      for (double l : ls) y.push_back(minus_part(l));
      return trapezoid(ls, y);
    };
    return {layered(fine_minus), layered(coarse_minus), -c * ray_power_integral(iv, n - 1)};
  };
  if (spec.method == QuadratureMethod::tensor_midpoint) {
    auto run = [&](std::size_t budget) {
      const auto grid = sphere_midpoint_grid(n, budget);
      RayValues s{0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const auto v = ray(grid.nodes[i]);
        s.layered += grid.weights[i] * v.layered;
        s.layered_coarse += grid.weights[i] * v.layered_coarse;
        s.direct += grid.weights[i] * v.direct;
      }
      return std::pair{s, grid.nodes.size()};
    };
    const auto [f, count] = run(spec.budget);
    const auto g = run(std::max<std::size_t>(spec.budget / 4, 16)).first;
    rep.layered_background = f.layered;
    rep.direct_background = f.direct;
    rep.residual1 = std::abs(f.layered - f.direct);
    rep.error1 = std::abs((f.layered - f.direct) - (g.layered - g.direct)) + std::abs(f.layered - f.layered_coarse);
    rep.rays = count;
  } else {
    Rng rng(spec.with_stream(5).seed);
    Accumulator diff, lay, lay_coarse, dir;
    for (std::size_t i = 0; i < spec.budget; ++i) {
      const auto v = ray(random_direction(n, rng));
      diff.add(v.layered - v.direct);
      lay.add(v.layered);
      lay_coarse.add(v.layered_coarse);
      dir.add(v.direct);
    }
    const double area = sphere_area(n);
    rep.layered_background = area * lay.mean();
    rep.direct_background = area * dir.mean();
    rep.residual1 = area * std::abs(diff.mean());
    rep.error1 = area * (diff.stderr_of_mean() + std::abs(lay.mean() - lay_coarse.mean()));
    rep.rays = spec.budget;
  }

  // Second identity along random lines x = p + t theta: heights x . nu = h0 + t c.
  const LineKernel square(RadialProfile::power(1.0, n - 1));
  const LineKernel linear(RadialProfile::power(1.0, n - 2));
  LineSampler sampler(n, e.frame(), spec.with_stream(6).seed);
  Accumulator diff, lay, lay_coarse, dir;
  for (std::size_t i = 0; i < spec.budget; ++i) {
    const auto line = sampler.next();
    const Intervals a = e.line_intervals(line.origin, line.dir);
    const double c = dot(line.dir, nu);
    const double h0 = dot(line.origin, nu);
    double direct = 0.0, layered = 0.0, layered_coarse = 0.0;
    if (!a.empty() && std::abs(c) > 1e-15) {
      direct = 0.5 * std::abs(c) * line_self_sum(square, a);
      auto cross = [&](double l) {
        const double t = (l - h0) / c;
        Intervals left, right;
        for (const auto& x : a) {
          if (x.hi <= t) left.push_back(x);
          else if (x.lo >= t) right.push_back(x);
          else {
            left.push_back({x.lo, t});
            right.push_back({t, x.hi});
          }
        }
        if (left.empty() || right.empty()) return 0.0;
        return line_cross_sum(linear, left, right);
      };
      auto integrate = [&](const std::vector<double>& ls) {
        std::vector<double> y;
        for (double l : ls) y.push_back(cross(l));
        return trapezoid(ls, y);
      };
      layered = integrate(fine);
      layered_coarse = integrate(coarse);
    }
    diff.add(layered - direct);
    lay.add(layered);
    lay_coarse.add(layered_coarse);
    dir.add(direct);
  }
  const double scale = 0.5 * sampler.measure();
  rep.layered_cross = scale * lay.mean();
  rep.direct_cross = scale * dir.mean();
  rep.residual2 = scale * std::abs(diff.mean());
  rep.error2 = scale * (diff.stderr_of_mean() + std::abs(lay.mean() - lay_coarse.mean()));
  rep.lines = spec.budget;
  return rep;
}

MassBoundReport averaged_mass_bound(const Shape& e, const EnergyParams& params, const QuadratureSpec& spec,
                                    const SliceGrid& grid) {
  spec.validate();
  params.validate();
  const int n = e.dimension();
  MassBoundReport rep;
  rep.sphere_constant = sphere_positive_integral(unit(0), n);
  rep.sphere_constant_uncorrected = sphere_positive_integral_uncorrected(unit(0), n);
  rep.offset_points = grid.offsets.empty() ? grid.offset_points : static_cast<int>(grid.offsets.size());
  const KernelSpec& ks = params.kernel;
  if (ks.kind == KernelKind::tabulated) {
    rep.warnings.push_back("closed-form constants C1, C2 are defined for the fractional kernels only");
    rep.c1_m = rep.c2_plus_a = std::numeric_limits<double>::quiet_NaN();
  }
  if (e.trivially_empty()) {
    rep.vacuous = true;
    return rep;
  }
  rep.mass = volume(e);
  if (ks.kind != KernelKind::tabulated) {
    const auto t = critical_mass(n, ks.s, ks.epsilon, params.A);
    rep.c1_m = t.constants.c1 * rep.mass;
    rep.c2_plus_a = t.constants.c2 + params.A;
  }
  const auto dirs = grid.directions.empty() ? default_directions(n) : grid.directions;
  rep.directions = static_cast<int>(dirs.size());
  const double wdir = sphere_weight(n, dirs.size());
  double il = 0.0, ik = 0.0, ir = 0.0, vl = 0.0, vk = 0.0, vr = 0.0, vd = 0.0;
  std::size_t cell = 0;
  for (const auto& nu_in : dirs) {
    const Vec nu = checked_direction(nu_in, n);
    // Offsets below 0 carry the A-term on E-, offsets from 0 up on E+; the two
    // branches are integrated separately because the background jumps at 0.
    std::vector<std::vector<double>> branches;
    if (!grid.offsets.empty()) {
      branches.push_back(offset_grid(e, nu, grid));
    } else {
      const auto [lo0, hi0] = extent(e, nu);
      const double pad = 0.5 * grid.padding * (hi0 - lo0);
      const double lo = lo0 - pad, hi = hi0 + pad;
      const int half = std::max(2, grid.offset_points / 2);
      if (lo < 0.0 && hi > 0.0) {
        branches.push_back(linspace(lo, 0.0, half));
        branches.push_back(linspace(0.0, hi, half));
      } else {
        branches.push_back(linspace(lo, hi, std::max(2, grid.offset_points)));
      }
    }
    for (std::size_t b = 0; b < branches.size(); ++b) {
      const auto& ls = branches[b];
      const auto w = trapezoid_weights(ls);
      const bool split = branches.size() == 2;
      for (std::size_t i = 0; i < ls.size(); ++i) {
        const bool a_on_plus = split ? b == 1 : ls[i] >= 0.0;
        const auto rec = cut_terms(e, nu, ls[i], params, spec.with_stream(++cell), a_on_plus);
        const double f = wdir * w[i];
        il += f * rec.lhs.value;
        ik += f * 2.0 * rec.kernel_cross.value;
        ir += f * params.A * rec.background.value;
        vl += f * f * rec.lhs.error * rec.lhs.error;
        vk += f * f * 4.0 * rec.kernel_cross.error * rec.kernel_cross.error;
        vr += f * f * params.A * params.A * rec.background.error * rec.background.error;
        vd += f * f * rec.defect_error * rec.defect_error;
        for (const auto& msg : rec.lhs.warnings) rep.warnings.push_back(msg);
      }
    }
  }
  auto estimate = [&](double value, double var) {
    IntegralEstimate est;
    est.value = value;
    est.error = std::sqrt(var);
    est.samples = cell;
    est.seed = spec.seed;
    est.method = "slice-grid";
    return est;
  };
  rep.averaged_lhs = estimate(il, vl);
  rep.averaged_kernel = estimate(ik, vk);
  rep.averaged_background = estimate(ir, vr);
  rep.averaged_defect = ik + ir - il;
  rep.averaged_defect_error = std::sqrt(vd);
  const double norm_factor = 2.0 * rep.sphere_constant * rep.mass;
  rep.mass_term = il / norm_factor;
  rep.mass_term_expected = 0.5 * rep.mass;
  rep.kernel_term = ik / norm_factor;
  rep.background_factor = params.A > 0.0 ? ir / (params.A * norm_factor) : 0.0;
  rep.nonexistence_signature = rep.averaged_defect < -3.0 * rep.averaged_defect_error;
  return rep;
}

}  // namespace droplab
