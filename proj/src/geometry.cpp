#include "droplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "droplab/constants.hpp"
#include "droplab/errors.hpp"

namespace droplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dimension(int n) {
  if (n != 2 && n != 3) throw ParameterError("shapes support dimensions 2 and 3 only");
}

Intervals ball_chords(const BallConfig& cfg, const Vec& o, const Vec& d) {
  Intervals out;
  for (const auto& b : cfg.balls()) {
    const Vec w = o - b.center;
    const double half_b = dot(d, w);
    const double disc = half_b * half_b - (dot(w, w) - b.radius * b.radius);
    if (disc <= 0.0) continue;
    const double root = std::sqrt(disc);
    out.push_back({-half_b - root, -half_b + root});
  }
  return merge_intervals(std::move(out));
}

// Slab test of the line against the grid box, then classify every segment between
// consecutive grid-plane crossings by its midpoint.
Intervals voxel_chords(const VoxelShape& v, const Vec& o, const Vec& d) {
  const int n = v.dimension();
  const double h = v.spacing();
  const Vec lo = v.origin();
  const Vec hi = v.upper_corner();
  double t0 = -kInf, t1 = kInf;
  for (int k = 0; k < n; ++k) {
    if (std::abs(d[k]) < 1e-300) {
      if (o[k] < lo[k] || o[k] >= hi[k]) return {};
      continue;
    }
    double a = (lo[k] - o[k]) / d[k];
    double b = (hi[k] - o[k]) / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  if (!(t1 > t0) || v.count() == 0) return {};

  std::vector<double> ts{t0, t1};
  for (int k = 0; k < n; ++k) {
    if (std::abs(d[k]) < 1e-300) continue;
    const auto dims = v.dims();
    for (int m = 1; m < dims[k]; ++m) {
      const double t = (lo[k] + m * h - o[k]) / d[k];
      if (t > t0 && t < t1) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());

  Intervals out;
  const auto dims = v.dims();
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = ts[i], b = ts[i + 1];
    if (!(b > a)) continue;
    const double tm = 0.5 * (a + b);
    std::array<int, 3> c{0, 0, 0};
    bool inside = true;
    for (int k = 0; k < n; ++k) {
      c[k] = static_cast<int>(std::floor((o[k] + tm * d[k] - lo[k]) / h));
      if (c[k] < 0 || c[k] >= dims[k]) inside = false;
    }
    if (!inside || !v.at(c[0], c[1], c[2])) continue;
    if (!out.empty() && out.back().hi >= a) {
      out.back().hi = b;
    } else {
      out.push_back({a, b});
    }
  }
  return out;
}

Intervals clip(Intervals iv, const Halfspace& hs, const Vec& o, const Vec& d) {
  const double rate = dot(d, hs.nu);
  const double start = dot(o, hs.nu);
  if (std::abs(rate) < 1e-300) {
    if (start >= hs.l) return iv;
    return {};
  }
  const double t = (hs.l - start) / rate;
  Intervals out;
  for (const auto& i : iv) {
    Interval c = i;
    if (rate > 0) c.lo = std::max(c.lo, t);
    else c.hi = std::min(c.hi, t);
    if (c.hi > c.lo) out.push_back(c);
  }
  return out;
}

std::pair<Vec, Vec> occupied_bounds(const VoxelShape& v) {
  const int n = v.dimension();
  std::array<int, 3> mn{v.dims()[0], v.dims()[1], v.dims()[2]};
  std::array<int, 3> mx{-1, -1, -1};
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (!v.at_index(idx)) continue;
    const auto c = v.coords(idx);
    for (int k = 0; k < 3; ++k) {
      mn[k] = std::min(mn[k], c[k]);
      mx[k] = std::max(mx[k], c[k]);
    }
  }
  Vec lo, hi;
  if (mx[0] < 0) return {v.origin(), v.origin()};
  for (int k = 0; k < n; ++k) {
    lo[k] = v.origin()[k] + mn[k] * v.spacing();
    hi[k] = v.origin()[k] + (mx[k] + 1) * v.spacing();
  }
  return {lo, hi};
}

// Midpoint line quadrature of the volume along axis 0; used for multiply-cut shapes.
double line_volume(const Shape& s) {
  const auto [lo, hi] = s.bounds();
  const int n = s.dimension();
  const int m = n == 2 ? 4096 : 512;
  const double w1 = (hi[1] - lo[1]) / m;
  const double w2 = n == 3 ? (hi[2] - lo[2]) / m : 1.0;
  const Vec dir = unit(0);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < (n == 3 ? m : 1); ++k) {
      Vec o(lo[0], lo[1] + (j + 0.5) * w1, n == 3 ? lo[2] + (k + 0.5) * w2 : 0.0);
      for (const auto& iv : s.line_intervals(o, dir)) sum += iv.length();
    }
  }
  return sum * w1 * w2;
}

}  // namespace

Intervals merge_intervals(Intervals iv) {
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  Intervals out;
  for (const auto& i : iv) {
    if (!(i.hi > i.lo)) continue;
    if (!out.empty() && i.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, i.hi);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

BallConfig::BallConfig(int dimension, std::vector<Ball> balls, bool disjoint)
    : dimension_(dimension), balls_(std::move(balls)), disjoint_(disjoint) {
  check_dimension(dimension_);
  for (const auto& b : balls_) {
    if (!(b.radius > 0.0) || !std::isfinite(b.radius)) throw ParameterError("ball radius must be positive");
    if (dimension_ == 2 && b.center[2] != 0.0) throw ParameterError("2-D ball centre has a z component");
  }
  if (disjoint_) {
    for (std::size_t i = 0; i < balls_.size(); ++i)
      for (std::size_t j = i + 1; j < balls_.size(); ++j) {
        const double d = norm(balls_[i].center - balls_[j].center);
        if (d < balls_[i].radius + balls_[j].radius)
          throw ParameterError("balls flagged disjoint overlap");
      }
  }
}

VoxelShape::VoxelShape(int dimension, std::array<int, 3> dims, Vec origin, double spacing)
    : dimension_(dimension), dims_(dims), origin_(origin), spacing_(spacing) {
  check_dimension(dimension_);
  if (!(spacing_ > 0.0)) throw ParameterError("voxel spacing must be positive");
  if (dimension_ == 2) dims_[2] = 1;
  for (int k = 0; k < 3; ++k)
    if (dims_[k] < 0) throw ParameterError("voxel dims must be nonnegative");
  cells_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], 0);
}

double VoxelShape::volume() const { return static_cast<double>(count_) * std::pow(spacing_, dimension_); }

std::size_t VoxelShape::index(int i, int j, int k) const {
  return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
}

std::array<int, 3> VoxelShape::coords(std::size_t idx) const {
  const int i = static_cast<int>(idx % dims_[0]);
  const std::size_t rest = idx / dims_[0];
  return {i, static_cast<int>(rest % dims_[1]), static_cast<int>(rest / dims_[1])};
}

bool VoxelShape::at(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i >= dims_[0] || j >= dims_[1] || k >= dims_[2]) return false;
  return cells_[index(i, j, k)] != 0;
}

void VoxelShape::set(int i, int j, int k, bool value) {
  if (i < 0 || j < 0 || k < 0 || i >= dims_[0] || j >= dims_[1] || k >= dims_[2])
    throw std::out_of_range("voxel index out of range");
  auto& c = cells_[index(i, j, k)];
  if (c && !value) --count_;
  if (!c && value) ++count_;
  c = value ? 1 : 0;
}

Vec VoxelShape::cell_center(int i, int j, int k) const {
  Vec c = origin_;
  c[0] += (i + 0.5) * spacing_;
  c[1] += (j + 0.5) * spacing_;
  if (dimension_ == 3) c[2] += (k + 0.5) * spacing_;
  return c;
}

Vec VoxelShape::upper_corner() const {
  Vec c = origin_;
  for (int k = 0; k < dimension_; ++k) c[k] += dims_[k] * spacing_;
  return c;
}

Halfspace::Halfspace(const Vec& n, double offset) : nu(n), l(offset) {
  if (std::abs(norm(n) - 1.0) > 1e-12) throw ParameterError("halfspace normal must be a unit vector");
}

Shape::Shape(BallConfig balls) : base_(std::move(balls)) {}
Shape::Shape(VoxelShape voxels) : base_(std::move(voxels)) {}

Shape Shape::empty(int dimension) { return Shape(BallConfig(dimension, {})); }

int Shape::dimension() const {
  return std::visit([](const auto& b) { return b.dimension(); }, base_);
}

const BallConfig& Shape::balls() const {
  if (!is_balls()) throw PreconditionError("shape is not a ball configuration");
  return std::get<BallConfig>(base_);
}

const VoxelShape& Shape::voxels() const {
  if (!is_voxels()) throw PreconditionError("shape is not a voxel set");
  return std::get<VoxelShape>(base_);
}

bool Shape::indicator(const Vec& x) const {
  for (const auto& c : cuts_)
    if (!c.contains(x)) return false;
  if (is_balls()) {
    for (const auto& b : balls().balls()) {
      const Vec w = x - b.center;
      if (dot(w, w) < b.radius * b.radius) return true;
    }
    return false;
  }
  const auto& v = voxels();
  std::array<int, 3> c{0, 0, 0};
  for (int k = 0; k < v.dimension(); ++k)
    c[k] = static_cast<int>(std::floor((x[k] - v.origin()[k]) / v.spacing()));
  return v.at(c[0], c[1], c[2]);
}

Intervals Shape::line_intervals(const Vec& origin, const Vec& dir) const {
  Intervals iv = is_balls() ? ball_chords(balls(), origin, dir) : voxel_chords(voxels(), origin, dir);
  for (const auto& c : cuts_) {
    if (iv.empty()) break;
    iv = clip(std::move(iv), c, origin, dir);
  }
  return iv;
}

std::pair<Vec, Vec> Shape::bounds() const {
  const int n = dimension();
  if (is_voxels()) return occupied_bounds(voxels());
  const auto& bs = balls().balls();
  if (bs.empty()) return {Vec(), Vec()};
  Vec lo = bs.front().center, hi = bs.front().center;
  for (int k = 0; k < n; ++k) {
    lo[k] = kInf;
    hi[k] = -kInf;
  }
  for (const auto& b : bs)
    for (int k = 0; k < n; ++k) {
      lo[k] = std::min(lo[k], b.center[k] - b.radius);
      hi[k] = std::max(hi[k], b.center[k] + b.radius);
    }
  return {lo, hi};
}

Frame Shape::frame() const {
  Frame f;
  if (trivially_empty()) return f;
  if (is_balls()) {
    const auto [lo, hi] = bounds();
    f.center = 0.5 * (lo + hi);
    for (const auto& b : balls().balls())
      f.radius = std::max(f.radius, norm(b.center - f.center) + b.radius);
    return f;
  }
  const auto [lo, hi] = bounds();
  f.center = 0.5 * (lo + hi);
  f.radius = 0.5 * norm(hi - lo);
  return f;
}

bool Shape::trivially_empty() const {
  if (is_balls()) return balls().empty();
  return voxels().count() == 0;
}

Shape Shape::cut(const Halfspace& h) const {
  Shape out = *this;
  out.cuts_.push_back(h);
  return out;
}

Shape translate_impl(const Shape& s, const Vec& v) {
  Shape out = s;
  if (s.is_balls()) {
    auto balls = s.balls().balls();
    for (auto& b : balls) b.center += v;
    out.base_ = BallConfig(s.dimension(), std::move(balls), s.balls().disjoint());
  } else {
    const auto& old = s.voxels();
    VoxelShape moved(old.dimension(), old.dims(), old.origin() + v, old.spacing());
    for (std::size_t i = 0; i < old.size(); ++i)
      if (old.at_index(i)) {
        const auto c = old.coords(i);
        moved.set(c[0], c[1], c[2], true);
      }
    out.base_ = std::move(moved);
  }
  for (auto& c : out.cuts_) c.l += dot(c.nu, v);
  return out;
}

Shape scale_impl(const Shape& s, double lambda) {
  Shape out = s;
  if (s.is_balls()) {
    auto balls = s.balls().balls();
    for (auto& b : balls) {
      b.center *= lambda;
      b.radius *= lambda;
    }
    out.base_ = BallConfig(s.dimension(), std::move(balls), s.balls().disjoint());
  } else {
    const auto& old = s.voxels();
    const int n = old.dimension();
    const double h = old.spacing();
    std::array<int, 3> dims{1, 1, 1};
    for (int k = 0; k < n; ++k) dims[k] = static_cast<int>(std::ceil(lambda * old.dims()[k] - 1e-9));
    VoxelShape scaled(n, dims, old.origin() * lambda, h);
    for (int k = 0; k < dims[2]; ++k)
      for (int j = 0; j < dims[1]; ++j)
        for (int i = 0; i < dims[0]; ++i) {
          const Vec pre = scaled.cell_center(i, j, k) * (1.0 / lambda);
          std::array<int, 3> c{0, 0, 0};
          for (int a = 0; a < n; ++a) c[a] = static_cast<int>(std::floor((pre[a] - old.origin()[a]) / h));
          if (old.at(c[0], c[1], c[2])) scaled.set(i, j, k, true);
        }
    out.base_ = std::move(scaled);
  }
  for (auto& c : out.cuts_) c.l *= lambda;
  return out;
}

double volume(const Shape& shape) {
  const int n = shape.dimension();
  if (shape.trivially_empty()) return 0.0;
  if (shape.is_voxels() && !shape.has_cuts()) return shape.voxels().volume();
  if (shape.is_balls()) {
    const auto& cfg = shape.balls();
    if (!cfg.disjoint()) {
      const auto& bs = cfg.balls();
      for (std::size_t i = 0; i < bs.size(); ++i)
        for (std::size_t j = i + 1; j < bs.size(); ++j)
          if (norm(bs[i].center - bs[j].center) < bs[i].radius + bs[j].radius)
            throw PreconditionError("volume undefined for overlapping balls in this representation");
    }
    if (shape.cuts().size() <= 1) {
      double sum = 0.0;
      for (const auto& b : cfg.balls()) {
        if (shape.cuts().empty()) {
          sum += ball_volume(n) * std::pow(b.radius, n);
        } else {
          const auto& c = shape.cuts().front();
          const double h = b.radius + dot(b.center, c.nu) - c.l;
          sum += cap_volume(n, b.radius, std::clamp(h, 0.0, 2.0 * b.radius));
        }
      }
      return sum;
    }
  }
  return line_volume(shape);
}

std::pair<Shape, Shape> slice(const Shape& shape, const Halfspace& h) {
  if (shape.plain_voxels()) {
    const auto& v = shape.voxels();
    VoxelShape plus(v.dimension(), v.dims(), v.origin(), v.spacing());
    VoxelShape minus = plus;
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
      if (!v.at_index(idx)) continue;
      const auto c = v.coords(idx);
      if (h.contains(v.cell_center(c[0], c[1], c[2]))) plus.set(c[0], c[1], c[2], true);
      else minus.set(c[0], c[1], c[2], true);
    }
    return {Shape(std::move(plus)), Shape(std::move(minus))};
  }
  return {shape.cut(h), shape.cut(h.flipped())};
}

Shape translate(const Shape& shape, const Vec& v) { return translate_impl(shape, v); }

ScaleResult scale(const Shape& shape, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scale factor must be positive");
  ScaleResult r{scale_impl(shape, lambda), 0.0};
  if (shape.plain_voxels()) {
    const double expect = std::pow(lambda, shape.dimension()) * shape.voxels().volume();
    r.resampling_error = std::abs(r.shape.voxels().volume() - expect);
  }
  return r;
}

bool indicator(const Shape& shape, const Vec& x) { return shape.indicator(x); }

double radius_of_volume(int dimension, double mass) {
  if (!(mass >= 0.0)) throw ParameterError("mass must be nonnegative");
  return std::pow(mass / ball_volume(dimension), 1.0 / dimension);
}

BallConfig ball_of_volume(int dimension, double mass) {
  if (!(mass > 0.0)) throw ParameterError("ball_of_volume needs a positive mass");
  return BallConfig(dimension, {Ball{Vec(), radius_of_volume(dimension, mass)}});
}

namespace {

VoxelShape voxelize_on(const Shape& shape, const Vec& origin, std::array<int, 3> dims, double h) {
  VoxelShape v(shape.dimension(), dims, origin, h);
  for (int k = 0; k < v.dims()[2]; ++k)
    for (int j = 0; j < v.dims()[1]; ++j)
      for (int i = 0; i < v.dims()[0]; ++i)
        if (shape.indicator(v.cell_center(i, j, k))) v.set(i, j, k, true);
  return v;
}

std::array<int, 3> dims_for(int n, const Vec& lo, const Vec& hi, double h) {
  std::array<int, 3> d{1, 1, 1};
  for (int k = 0; k < n; ++k) d[k] = std::max(1, static_cast<int>(std::ceil((hi[k] - lo[k]) / h - 1e-9)));
  return d;
}

}  // namespace

VoxelShape voxelize(const Shape& shape, double spacing) {
  if (!(spacing > 0.0)) throw ParameterError("voxel spacing must be positive");
  const int n = shape.dimension();
  if (shape.trivially_empty()) return VoxelShape(n, {0, 0, 0}, Vec(), spacing);
  const auto [lo, hi] = shape.bounds();
  return voxelize_on(shape, lo, dims_for(n, lo, hi, spacing), spacing);
}

std::pair<VoxelShape, VoxelShape> voxelize_common(const Shape& a, const Shape& b, double spacing) {
  if (a.dimension() != b.dimension()) throw ParameterError("shapes of different dimension");
  const int n = a.dimension();
  Vec lo, hi;
  bool first = true;
  for (const Shape* s : {&a, &b}) {
    if (s->trivially_empty()) continue;
    const auto [l, h] = s->bounds();
    for (int k = 0; k < n; ++k) {
      lo[k] = first ? l[k] : std::min(lo[k], l[k]);
      hi[k] = first ? h[k] : std::max(hi[k], h[k]);
    }
    first = false;
  }
  const auto dims = first ? std::array<int, 3>{0, 0, 0} : dims_for(n, lo, hi, spacing);
  return {voxelize_on(a, lo, dims, spacing), voxelize_on(b, lo, dims, spacing)};
}

bool same_lattice(const VoxelShape& a, const VoxelShape& b) {
  if (a.dimension() != b.dimension()) return false;
  const double h = a.spacing();
  if (std::abs(a.spacing() - b.spacing()) > 1e-12 * h) return false;
  for (int k = 0; k < a.dimension(); ++k) {
    const double shift = (b.origin()[k] - a.origin()[k]) / h;
    if (std::abs(shift - std::round(shift)) > 1e-9) return false;
  }
  return true;
}

std::pair<VoxelShape, VoxelShape> common_lattice(const VoxelShape& a, const VoxelShape& b) {
  if (!same_lattice(a, b)) throw PreconditionError("voxel sets do not share a lattice");
  const int n = a.dimension();
  const double h = a.spacing();
  std::array<int, 3> shift_b{0, 0, 0}, lo{0, 0, 0}, hi{1, 1, 1};
  for (int k = 0; k < n; ++k) {
    shift_b[k] = static_cast<int>(std::lround((b.origin()[k] - a.origin()[k]) / h));
    lo[k] = std::min(0, shift_b[k]);
    hi[k] = std::max(a.dims()[k], shift_b[k] + b.dims()[k]);
  }
  std::array<int, 3> dims{1, 1, 1};
  Vec origin = a.origin();
  for (int k = 0; k < n; ++k) {
    dims[k] = hi[k] - lo[k];
    origin[k] = a.origin()[k] + lo[k] * h;
  }
  VoxelShape ea(n, dims, origin, h), eb(n, dims, origin, h);
  for (std::size_t idx = 0; idx < a.size(); ++idx)
    if (a.at_index(idx)) {
      const auto c = a.coords(idx);
      ea.set(c[0] - lo[0], c[1] - lo[1], c[2] - lo[2], true);
    }
  for (std::size_t idx = 0; idx < b.size(); ++idx)
    if (b.at_index(idx)) {
      const auto c = b.coords(idx);
      eb.set(c[0] + shift_b[0] - lo[0], c[1] + shift_b[1] - lo[1], c[2] + shift_b[2] - lo[2], true);
    }
  return {std::move(ea), std::move(eb)};
}

VoxelShape voxel_union(const VoxelShape& a, const VoxelShape& b) {
  auto [ea, eb] = common_lattice(a, b);
  for (std::size_t idx = 0; idx < eb.size(); ++idx)
    if (eb.at_index(idx)) {
      const auto c = eb.coords(idx);
      ea.set(c[0], c[1], c[2], true);
    }
  return std::move(ea);
}

Shape unite(const Shape& a, const Shape& b) {
  if (a.dimension() != b.dimension()) throw ParameterError("shapes of different dimension");
  if (a.trivially_empty() && !b.has_cuts()) return b;
  if (b.trivially_empty() && !a.has_cuts()) return a;
  if (a.plain_balls() && b.plain_balls()) {
    auto balls = a.balls().balls();
    balls.insert(balls.end(), b.balls().balls().begin(), b.balls().balls().end());
    return Shape(BallConfig(a.dimension(), std::move(balls), a.balls().disjoint() && b.balls().disjoint()));
  }
  if (a.plain_voxels() && b.plain_voxels()) return Shape(voxel_union(a.voxels(), b.voxels()));
  throw ParameterError("union needs two ball configurations or two voxel sets on a shared lattice");
}

double cap_volume(int dimension, double r, double h) {
  if (h <= 0.0) return 0.0;
  if (h >= 2.0 * r) return ball_volume(dimension) * std::pow(r, dimension);
  if (dimension == 2) {
    const double a = r - h;
    return r * r * std::acos(a / r) - a * std::sqrt(std::max(0.0, 2.0 * r * h - h * h));
  }
  if (dimension == 3) return std::numbers::pi * h * h * (3.0 * r - h) / 3.0;
  throw ParameterError("cap volume supports dimensions 2 and 3");
}

double lens_volume(int dimension, double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) return ball_volume(dimension) * std::pow(std::min(r1, r2), dimension);
  const double x1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
  return cap_volume(dimension, r1, r1 - x1) + cap_volume(dimension, r2, r2 - (d - x1));
}

double overlap_volume(const Shape& a, const Shape& b) {
  if (a.trivially_empty() || b.trivially_empty()) return 0.0;
  if (a.plain_balls() && b.plain_balls()) {
    double sum = 0.0;
    for (const auto& x : a.balls().balls())
      for (const auto& y : b.balls().balls())
        sum += lens_volume(a.dimension(), x.radius, y.radius, norm(x.center - y.center));
    return sum;
  }
  if (a.plain_voxels() && b.plain_voxels() && same_lattice(a.voxels(), b.voxels())) {
    const auto [ea, eb] = common_lattice(a.voxels(), b.voxels());
    std::size_t common = 0;
    for (std::size_t i = 0; i < ea.size(); ++i) common += (ea.at_index(i) && eb.at_index(i)) ? 1 : 0;
    return static_cast<double>(common) * std::pow(ea.spacing(), ea.dimension());
  }
  // Exact per-line overlap, midpoint quadrature across lines parallel to axis 0.
  const int n = a.dimension();
  auto [lo, hi] = a.bounds();
  const auto [lo2, hi2] = b.bounds();
  for (int k = 0; k < n; ++k) {
    lo[k] = std::max(lo[k], lo2[k]);
    hi[k] = std::min(hi[k], hi2[k]);
    if (!(hi[k] > lo[k])) return 0.0;
  }
  const int m = n == 2 ? 4096 : 256;
  const double w1 = (hi[1] - lo[1]) / m;
  const double w2 = n == 3 ? (hi[2] - lo[2]) / m : 1.0;
  double sum = 0.0;
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < (n == 3 ? m : 1); ++k) {
      Vec o(lo[0], lo[1] + (j + 0.5) * w1, n == 3 ? lo[2] + (k + 0.5) * w2 : 0.0);
      const auto ia = a.line_intervals(o, unit(0));
      const auto ib = b.line_intervals(o, unit(0));
      for (const auto& x : ia)
        for (const auto& y : ib) sum += std::max(0.0, std::min(x.hi, y.hi) - std::max(x.lo, y.lo));
    }
  return sum * w1 * w2;
}

void write_voxels(std::ostream& os, const VoxelShape& v) {
  os.precision(17);
  const int n = v.dimension();
  os << "# droplab voxel grid\n";
  os << "dimension " << n << '\n';
  os << "dims";
  for (int k = 0; k < n; ++k) os << ' ' << v.dims()[k];
  os << "\norigin";
  for (int k = 0; k < n; ++k) os << ' ' << v.origin()[k];
  os << "\nspacing " << v.spacing() << '\n';
  if (v.size() == 0) return;
  for (int k = 0; k < v.dims()[2]; ++k)
    for (int j = 0; j < v.dims()[1]; ++j) {
      std::string row(static_cast<std::size_t>(v.dims()[0]), '0');
      for (int i = 0; i < v.dims()[0]; ++i)
        if (v.at(i, j, k)) row[static_cast<std::size_t>(i)] = '1';
      os << row << '\n';
    }
}

VoxelShape read_voxels(std::istream& is) {
  int n = 0;
  std::array<int, 3> dims{0, 1, 1};
  Vec origin;
  double h = 0.0;
  std::string line;
  int header = 0;
  while (header < 4 && std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dimension") {
      ls >> n;
      check_dimension(n);
    } else if (key == "dims") {
      for (int k = 0; k < n; ++k) ls >> dims[k];
    } else if (key == "origin") {
      for (int k = 0; k < n; ++k) ls >> origin[k];
    } else if (key == "spacing") {
      ls >> h;
    } else {
      throw ConfigError("voxel grid: unexpected header key '" + key + "'");
    }
    if (!ls) throw ConfigError("voxel grid: malformed header line '" + line + "'");
    ++header;
  }
  if (header < 4) throw ConfigError("voxel grid: incomplete header");
  VoxelShape v(n, dims, origin, h);
  const int rows = dims[1] * (n == 3 ? dims[2] : 1);
  for (int r = 0; r < rows && v.size() > 0; ++r) {
    do {
      if (!std::getline(is, line)) throw ConfigError("voxel grid: missing rows");
    } while (line.empty() || line[0] == '#');
    if (static_cast<int>(line.size()) < dims[0]) throw ConfigError("voxel grid: short row");
    const int j = r % dims[1];
    const int k = r / dims[1];
    for (int i = 0; i < dims[0]; ++i) {
      const char c = line[static_cast<std::size_t>(i)];
      if (c != '0' && c != '1') throw ConfigError("voxel grid: cells must be 0 or 1");
      if (c == '1') v.set(i, j, k, true);
    }
  }
  return v;
}

void write_balls_csv(std::ostream& os, const BallConfig& b) {
  os.precision(17);
  os << (b.dimension() == 2 ? "x,y,r\n" : "x,y,z,r\n");
  for (const auto& ball : b.balls()) {
    for (int k = 0; k < b.dimension(); ++k) os << ball.center[k] << ',';
    os << ball.radius << '\n';
  }
}

BallConfig read_balls_csv(std::istream& is, int dimension_hint) {
  int n = dimension_hint;
  std::vector<Ball> balls;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    const bool numeric = !cols.empty() && (std::isdigit(static_cast<unsigned char>(cols[0][0])) ||
                                           cols[0][0] == '-' || cols[0][0] == '+' || cols[0][0] == '.');
    const int n_here = static_cast<int>(cols.size()) - 1;
    if (n == 0) n = n_here;
    if (n_here != n) throw ConfigError("ball csv: expected " + std::to_string(n + 1) + " columns");
    if (!numeric) continue;
    Ball b;
    try {
      for (int k = 0; k < n; ++k) b.center[k] = std::stod(cols[static_cast<std::size_t>(k)]);
      b.radius = std::stod(cols.back());
    } catch (const std::exception&) {
      throw ConfigError("ball csv: non-numeric entry in '" + line + "'");
    }
    balls.push_back(b);
  }
  if (n == 0) throw ConfigError("ball csv: cannot infer dimension from an empty file");
  return BallConfig(n, std::move(balls), false);
}

Shape load_shape(const std::string& path, int dimension_hint) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot open shape file '" + path + "'");
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  if (csv) return Shape(read_balls_csv(in, dimension_hint));
  return Shape(read_voxels(in));
}

void save_shape(const std::string& path, const Shape& shape) {
  if (shape.has_cuts()) throw PreconditionError("cut shapes have no file representation");
  std::ofstream out(path);
  if (!out) throw PathError("cannot write shape file '" + path + "'");
  if (shape.is_balls()) write_balls_csv(out, shape.balls());
  else write_voxels(out, shape.voxels());
}

}  // namespace droplab
