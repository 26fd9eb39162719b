#include "droplab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "droplab/ball_paths.hpp"
#include "droplab/chord.hpp"
#include "droplab/constants.hpp"
#include "droplab/errors.hpp"
#include "droplab/lattice.hpp"
#include "droplab/sampling.hpp"

namespace droplab {

std::string to_string(QuadratureMethod m) {
  return m == QuadratureMethod::monte_carlo ? "monte-carlo" : "tensor-midpoint";
}

std::string to_string(NearDiagonal m) { return m == NearDiagonal::skip_and_bound ? "skip-and-bound" : "pair-offset"; }

std::string to_string(Sampler m) { return m == Sampler::chord ? "chord" : "pair"; }

QuadratureMethod quadrature_method_from_string(const std::string& s) {
  if (s == "monte-carlo") return QuadratureMethod::monte_carlo;
  if (s == "tensor-midpoint") return QuadratureMethod::tensor_midpoint;
  throw ParameterError("unknown quadrature method '" + s + "' (monte-carlo, tensor-midpoint)");
}

NearDiagonal near_diagonal_from_string(const std::string& s) {
  if (s == "skip-and-bound") return NearDiagonal::skip_and_bound;
  if (s == "pair-offset") return NearDiagonal::pair_offset;
  throw ParameterError("unknown near-diagonal treatment '" + s + "' (skip-and-bound, pair-offset)");
}

Sampler sampler_from_string(const std::string& s) {
  if (s == "chord") return Sampler::chord;
  if (s == "pair") return Sampler::pair;
  throw ParameterError("unknown sampler '" + s + "' (chord, pair)");
}

void QuadratureSpec::validate() const {
  if (budget < 1000) throw ParameterError("quadrature budget must be at least 1000");
  if (grid_cells < 4) throw ParameterError("grid_cells must be at least 4");
}

QuadratureSpec QuadratureSpec::with_stream(std::uint64_t stream) const {
  QuadratureSpec s = *this;
  s.seed = derive_seed(seed, stream);
  return s;
}

IntegralEstimate combine(const IntegralEstimate& x, double a, const IntegralEstimate& y, double b) {
  IntegralEstimate r;
  r.value = a * x.value + b * y.value;
  r.error = std::hypot(a * x.error, b * y.error);
  r.samples = x.samples + y.samples;
  r.seed = x.seed;
  r.method = x.method == y.method || y.method.empty() ? x.method : x.method.empty() ? y.method : x.method + "+" + y.method;
  r.warnings = x.warnings;
  for (const auto& w : y.warnings)
    if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) r.warnings.push_back(w);
  return r;
}

IntegralEstimate scaled(const IntegralEstimate& x, double a) {
  IntegralEstimate r = x;
  r.value *= a;
  r.error *= std::abs(a);
  return r;
}

IntegralEstimate exact_zero(const std::string& method) {
  IntegralEstimate r;
  r.method = method;
  return r;
}

namespace {

double box_volume(const Vec& lo, const Vec& hi, int n) {
  double v = 1.0;
  for (int k = 0; k < n; ++k) v *= hi[k] - lo[k];
  return v;
}

// Cell centres of a regular grid over [lo, hi] with `cells` along the longest axis.
struct Grid {
  std::vector<Vec> centers;
  double cell_volume = 0.0;
  double spacing = 0.0;
};

Grid grid_over(const Vec& lo, const Vec& hi, int n, int cells) {
  double longest = 0.0;
  for (int k = 0; k < n; ++k) longest = std::max(longest, hi[k] - lo[k]);
  Grid g;
  if (!(longest > 0.0)) return g;
  g.spacing = longest / cells;
  std::array<int, 3> dims{1, 1, 1};
  for (int k = 0; k < n; ++k) dims[k] = std::max(1, static_cast<int>(std::ceil((hi[k] - lo[k]) / g.spacing - 1e-9)));
  g.cell_volume = std::pow(g.spacing, n);
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        Vec c = lo;
        c[0] += (i + 0.5) * g.spacing;
        c[1] += (j + 0.5) * g.spacing;
        if (n == 3) c[2] += (k + 0.5) * g.spacing;
        g.centers.push_back(c);
      }
  return g;
}

double longest_extent(const Shape& s) {
  const auto [lo, hi] = s.bounds();
  double longest = 0.0;
  for (int k = 0; k < s.dimension(); ++k) longest = std::max(longest, hi[k] - lo[k]);
  return longest;
}

bool ball_path(const Shape& s, const QuadratureSpec& spec) {
  if (!spec.exact_balls || !s.plain_balls()) return false;
  const auto& b = s.balls().balls();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (norm(b[i].center - b[j].center) < (b[i].radius + b[j].radius) * (1.0 - 1e-12)) return false;
  return true;
}

// Grid a non-voxel shape at h and 2h, evaluate at both; the spread is the discretisation error.
template <class F>
IntegralEstimate gridded(const Shape& s, const QuadratureSpec& spec, F&& eval) {
  const double h = longest_extent(s) / spec.grid_cells;
  if (!(h > 0.0)) return exact_zero("lattice");
  IntegralEstimate fine = eval(voxelize(s, h));
  const IntegralEstimate coarse = eval(voxelize(s, 2.0 * h));
  fine.error += std::abs(fine.value - coarse.value);
  fine.method = "lattice/gridded";
  return fine;
}

template <class F>
IntegralEstimate gridded_pair(const Shape& u, const Shape& w, const QuadratureSpec& spec, F&& eval) {
  const double h = std::max(longest_extent(u), longest_extent(w)) / spec.grid_cells;
  if (!(h > 0.0)) return exact_zero("lattice");
  const auto [uf, wf] = voxelize_common(u, w, h);
  IntegralEstimate fine = eval(uf, wf);
  const auto [uc, wc] = voxelize_common(u, w, 2.0 * h);
  const IntegralEstimate coarse = eval(uc, wc);
  fine.error += std::abs(fine.value - coarse.value);
  fine.method = "lattice/gridded";
  return fine;
}

// Independent point pairs in the bounding boxes (finite variance needs g in L^2 near the diagonal).
IntegralEstimate pair_sampler(const Shape& u, const Shape& w, const std::function<double(const Vec&, const Vec&)>& g,
                              const QuadratureSpec& spec) {
  const int n = u.dimension();
  const auto [ulo, uhi] = u.bounds();
  const auto [wlo, whi] = w.bounds();
  const double scale = box_volume(ulo, uhi, n) * box_volume(wlo, whi, n);
  Rng rng(spec.seed);
  Accumulator acc;
  for (std::size_t i = 0; i < spec.budget; ++i) {
    Vec x, y;
    for (int k = 0; k < n; ++k) x[k] = rng.uniform(ulo[k], uhi[k]);
    for (int k = 0; k < n; ++k) y[k] = rng.uniform(wlo[k], whi[k]);
    acc.add(u.indicator(x) && w.indicator(y) ? g(x, y) : 0.0);
  }
  IntegralEstimate e;
  e.value = scale * acc.mean();
  e.error = scale * acc.stderr_of_mean();
  e.samples = spec.budget;
  e.seed = spec.seed;
  e.method = "monte-carlo/pair";
  return e;
}

}  // namespace

IntegralEstimate radial_complement_integral(const Shape& e, const RadialProfile& k, const QuadratureSpec& spec) {
  spec.validate();
  if (e.trivially_empty()) return exact_zero();
  if (ball_path(e, spec)) return balls_complement(e.balls(), k);
  if (spec.method == QuadratureMethod::tensor_midpoint) {
    if (e.plain_voxels()) return lattice_complement(e.voxels(), k);
    return gridded(e, spec, [&](const VoxelShape& v) { return lattice_complement(v, k); });
  }
  if (spec.sampler == Sampler::pair)
    throw ParameterError("the point-pair sampler has infinite variance for the nonlocal perimeter; use chord");
  return chord_complement(e, k, spec);
}

IntegralEstimate radial_self_integral(const Shape& e, const RadialProfile& g, const QuadratureSpec& spec) {
  spec.validate();
  if (e.trivially_empty()) return exact_zero();
  if (ball_path(e, spec)) return balls_self_pair(e.balls(), g);
  if (spec.method == QuadratureMethod::tensor_midpoint) {
    if (e.plain_voxels()) return lattice_pair(e.voxels(), e.voxels(), g);
    return gridded(e, spec, [&](const VoxelShape& v) { return lattice_pair(v, v, g); });
  }
  if (spec.sampler == Sampler::pair)
    return pair_sampler(e, e, [&](const Vec& x, const Vec& y) { return g(norm(x - y)); }, spec);
  return chord_self(e, g, spec);
}

IntegralEstimate radial_cross_integral(const Shape& u, const Shape& w, const RadialProfile& g,
                                       const QuadratureSpec& spec) {
  spec.validate();
  if (u.dimension() != w.dimension()) throw ParameterError("shapes of different dimension");
  if (u.trivially_empty() || w.trivially_empty()) return exact_zero();
  if (ball_path(u, spec) && ball_path(w, spec)) return balls_cross_pair(u.balls(), w.balls(), g);
  if (spec.method == QuadratureMethod::tensor_midpoint) {
    if (u.plain_voxels() && w.plain_voxels() && same_lattice(u.voxels(), w.voxels())) {
      const auto [a, b] = common_lattice(u.voxels(), w.voxels());
      return lattice_pair(a, b, g);
    }
    return gridded_pair(u, w, spec, [&](const VoxelShape& a, const VoxelShape& b) {
      // Gridding can make touching shapes share a cell; that is a discretisation artefact.
      const Correlation c(a, b);
      if (c.at(0, 0, 0) > 0.0) {
        VoxelShape bb = b;
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a.at_index(i)) {
            const auto x = a.coords(i);
            bb.set(x[0], x[1], x[2], false);
          }
        return lattice_pair(a, bb, g);
      }
      return lattice_pair(a, b, g);
    });
  }
  if (spec.sampler == Sampler::pair)
    return pair_sampler(u, w, [&](const Vec& x, const Vec& y) { return g(norm(x - y)); }, spec);
  return chord_cross(u, w, g, spec);
}

IntegralEstimate power_integral(const Shape& e, double beta, const QuadratureSpec& spec) {
  spec.validate();
  if (e.trivially_empty()) return exact_zero();
  if (ball_path(e, spec)) return balls_background(e.balls(), beta);
  if (e.plain_voxels() && spec.method == QuadratureMethod::tensor_midpoint) return lattice_background(e.voxels(), beta);
  return ray_background(e, beta, spec);
}

IntegralEstimate integral_over(const Shape& e, const std::function<double(const Vec&)>& f,
                               const QuadratureSpec& spec) {
  spec.validate();
  const int n = e.dimension();
  if (e.trivially_empty()) return exact_zero();
  const auto [lo, hi] = e.bounds();
  if (spec.method == QuadratureMethod::tensor_midpoint) {
    auto run = [&](int cells) {
      const Grid g = grid_over(lo, hi, n, cells);
      double sum = 0.0;
      for (const auto& c : g.centers)
        if (e.indicator(c)) sum += f(c);
      return std::pair{sum * g.cell_volume, g.centers.size()};
    };
    const auto fine = run(spec.grid_cells);
    const auto coarse = run(std::max(1, spec.grid_cells / 2));
    IntegralEstimate r;
    r.value = fine.first;
    r.error = std::abs(fine.first - coarse.first);
    r.samples = fine.second;
    r.method = "tensor-midpoint";
    return r;
  }
  const double vol = box_volume(lo, hi, n);
  Rng rng(spec.seed);
  Accumulator acc;
  for (std::size_t i = 0; i < spec.budget; ++i) {
    Vec x;
    for (int k = 0; k < n; ++k) x[k] = rng.uniform(lo[k], hi[k]);
    acc.add(e.indicator(x) ? f(x) : 0.0);
  }
  IntegralEstimate r;
  r.value = vol * acc.mean();
  r.error = vol * acc.stderr_of_mean();
  r.samples = spec.budget;
  r.seed = spec.seed;
  r.method = "monte-carlo";
  return r;
}

IntegralEstimate double_integral(const Shape& e, const Shape& f,
                                 const std::function<double(const Vec&, const Vec&)>& g,
                                 const QuadratureSpec& spec) {
  spec.validate();
  const int n = e.dimension();
  if (e.trivially_empty() || f.trivially_empty()) return exact_zero();
  if (spec.method == QuadratureMethod::monte_carlo) return pair_sampler(e, f, g, spec);
  // Midpoint rule on one grid covering both sets, so coincident cells are identifiable.
  const auto [elo, ehi] = e.bounds();
  const auto [flo, fhi] = f.bounds();
  Vec lo, hi;
  for (int k = 0; k < n; ++k) {
    lo[k] = std::min(elo[k], flo[k]);
    hi[k] = std::max(ehi[k], fhi[k]);
  }
  struct Run {
    double value = 0.0;
    double bound = 0.0;
    std::size_t skipped = 0;
    std::size_t pairs = 0;
  };
  auto run = [&](int cells) {
    const Grid grid = grid_over(lo, hi, n, cells);
    std::vector<std::size_t> in_e, in_f;
    for (std::size_t i = 0; i < grid.centers.size(); ++i) {
      if (e.indicator(grid.centers[i])) in_e.push_back(i);
      if (f.indicator(grid.centers[i])) in_f.push_back(i);
    }
    Run r;
    const double w = grid.cell_volume * grid.cell_volume;
    const double q = 0.25 * grid.spacing;
    for (std::size_t i : in_e)
      for (std::size_t j : in_f) {
        const Vec& x = grid.centers[i];
        const Vec& y = grid.centers[j];
        ++r.pairs;
        if (i != j) {
          r.value += w * g(x, y);
          continue;
        }
        if (spec.near_diagonal == NearDiagonal::skip_and_bound) {
          // Skipped; the bound uses the value at the typical in-cell separation h/2.
          ++r.skipped;
          r.bound += w * std::abs(g(x - unit(0) * q, x + unit(0) * q));
          continue;
        }
        // Symmetric offsets along each axis at the mean in-cell separation.
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += g(x - unit(k) * q, x + unit(k) * q);
        r.value += w * s / n;
      }
    return r;
  };
  const Run fine = run(spec.grid_cells);
  const Run coarse = run(std::max(1, spec.grid_cells / 2));
  IntegralEstimate out;
  out.value = fine.value;
  out.error = std::abs(fine.value - coarse.value) + fine.bound;
  out.samples = fine.pairs;
  out.method = "tensor-midpoint";
  if (fine.skipped > 0)
    out.warnings.push_back(std::to_string(fine.skipped) + " coincident cell pair(s) skipped and bounded");
  return out;
}

IntegralEstimate complement_double_integral(const Shape& e, const Kernel& kernel, const QuadratureSpec& spec) {
  if (kernel.dimension() != e.dimension()) throw ParameterError("kernel and shape dimensions differ");
  return radial_complement_integral(e, kernel.profile(), spec);
}

IntegralEstimate sphere_average(const std::function<double(const Vec&)>& f, int dimension,
                                const QuadratureSpec& spec) {
  spec.validate();
  IntegralEstimate r;
  if (spec.method == QuadratureMethod::tensor_midpoint) {
    auto run = [&](std::size_t budget) {
      const auto grid = sphere_midpoint_grid(dimension, budget);
      double sum = 0.0;
      for (std::size_t i = 0; i < grid.nodes.size(); ++i) sum += grid.weights[i] * f(grid.nodes[i]);
      return std::pair{sum, grid.nodes.size()};
    };
    const auto fine = run(spec.budget);
    const auto coarse = run(std::max<std::size_t>(spec.budget / 4, 16));
    r.value = fine.first;
    r.error = std::abs(fine.first - coarse.first);
    r.samples = fine.second;
    r.method = "tensor-midpoint";
    return r;
  }
  Rng rng(spec.seed);
  Accumulator acc;
  for (std::size_t i = 0; i < spec.budget; ++i) acc.add(f(random_direction(dimension, rng)));
  const double area = sphere_area(dimension);
  r.value = area * acc.mean();
  r.error = area * acc.stderr_of_mean();
  r.samples = spec.budget;
  r.seed = spec.seed;
  r.method = "monte-carlo";
  return r;
}

}  // namespace droplab
