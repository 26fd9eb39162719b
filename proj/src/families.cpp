#include "droplab/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "droplab/errors.hpp"
#include "droplab/kernels.hpp"
#include "droplab/lattice.hpp"
#include "droplab/sampling.hpp"

namespace droplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

EnergyParams without_background(EnergyParams p) {
  p.A = 0.0;
  return p;
}

TwoBallReport from_parts(const TwoBallConfig& cfg, const EnergyReport& first, const EnergyReport& second,
                         const EnergyParams& params, const QuadratureSpec& spec) {
  TwoBallReport r;
  r.config = cfg;
  r.first = first;
  r.second = second;
  if (std::isinf(cfg.d)) {
    r.kernel_cross = exact_zero();
    r.riesz_cross = exact_zero();
    r.set_distance = kInf;
    r.riesz_bound = 0.0;
    r.bound_applies = true;
  } else {
    const int n = cfg.dimension;
    const Shape b1(BallConfig(n, {Ball{Vec(), cfg.r1()}}));
    Vec c2;
    c2[0] = cfg.d;
    const Shape b2(BallConfig(n, {Ball{c2, cfg.r2()}}));
    r.kernel_cross = interaction(b1, b2, PairWeight::kernel(Kernel(params.kernel)), spec.with_stream(31));
    r.riesz_cross = interaction(b1, b2, PairWeight::riesz(params.alpha), spec.with_stream(32));
    r.set_distance = cfg.d - cfg.touching();
    r.riesz_bound = 2.0 * cfg.m1 * cfg.m2 / cfg.d;
    r.bound_applies = r.set_distance >= 0.5 * cfg.d;
    if (params.alpha == 1.0 && r.bound_applies &&
        r.riesz_cross.value > r.riesz_bound + 3.0 * r.riesz_cross.error + 1e-12 * r.riesz_bound)
      throw NumericalError("riesz cross term " + std::to_string(r.riesz_cross.value) + " exceeds the separation bound " +
                           std::to_string(r.riesz_bound));
  }
  const auto p = combine(combine(first.perimeter, 1.0, second.perimeter, 1.0), 1.0, r.kernel_cross, -2.0);
  const auto v = combine(combine(first.riesz, 1.0, second.riesz, 1.0), 1.0, r.riesz_cross, 1.0);
  r.energy = assemble(p, v, first.background, params);
  return r;
}

void push(FamilySearchResult& res, const FamilyMember& member, double energy, double error) {
  TraceEntry t;
  t.member = member;
  t.energy = energy;
  t.error = error;
  if (res.trace.empty() || energy < res.best_energy) {
    res.best = member;
    res.best_energy = energy;
    res.best_error = error;
  }
  t.best_energy = res.best_energy;
  res.trace.push_back(t);
}

void finish(FamilySearchResult& res) {
  const TraceEntry* split = nullptr;
  for (const auto& t : res.trace)
    if (t.member.kind != "ball" && (!split || t.energy < split->energy)) split = &t;
  if (!split) {
    res.margin = std::numeric_limits<double>::quiet_NaN();
    res.margin_error = 0.0;
    res.warnings.push_back("family has no split competitor; margin undefined");
    return;
  }
  res.margin = res.reference_energy - split->energy;
  res.margin_error = std::hypot(split->error, res.reference_error);
}

}  // namespace

double TwoBallConfig::r1() const { return radius_of_volume(dimension, m1); }
double TwoBallConfig::r2() const { return radius_of_volume(dimension, m2); }

void TwoBallConfig::validate() const {
  if (dimension != 2 && dimension != 3) throw ParameterError("two-ball configurations support dimensions 2 and 3");
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw ParameterError("two-ball masses must be positive");
  if (!(d > 0.0)) throw ParameterError("two-ball separation must be positive");
  if (d < touching() * (1.0 - 1e-12))
    throw PreconditionError("balls overlap: separation " + std::to_string(d) + " below touching distance " +
                            std::to_string(touching()));
}

BallConfig TwoBallConfig::balls() const {
  validate();
  if (std::isinf(d)) throw ParameterError("the far limit has no finite geometry");
  Vec c2;
  c2[0] = d;
  return BallConfig(dimension, {Ball{Vec(), r1()}, Ball{c2, r2()}});
}

EnergyReport single_ball_energy(double m, const EnergyParams& params, const QuadratureSpec& spec) {
  if (!(m > 0.0)) throw ParameterError("mass must be positive");
  return total_energy(Shape(ball_of_volume(params.dimension(), m)), params, spec);
}

TwoBallReport two_ball_energy(const TwoBallConfig& cfg, const EnergyParams& params, const QuadratureSpec& spec) {
  cfg.validate();
  params.validate();
  if (cfg.dimension != params.dimension()) throw ParameterError("configuration and kernel dimensions differ");
  const auto first = single_ball_energy(cfg.m1, params, spec.with_stream(1));
  const auto second = single_ball_energy(cfg.m2, without_background(params), spec.with_stream(2));
  return from_parts(cfg, first, second, params, spec);
}

std::vector<double> distance_grid(double touching, double reference_diameter, const FamilyGrid& grid) {
  if (!grid.distances.empty()) {
    std::vector<double> out;
    for (double d : grid.distances)
      if (d >= touching * (1.0 - 1e-12)) out.push_back(std::max(d, touching));
    return out;
  }
  if (grid.d_points < 1) return {};
  double hi = grid.d_max_factor * reference_diameter;
  if (!(hi > touching)) hi = 10.0 * touching;
  if (grid.d_points == 1) return {touching};
  std::vector<double> out;
  const double ratio = std::log(hi / touching);
  for (int i = 0; i < grid.d_points; ++i) out.push_back(touching * std::exp(ratio * i / (grid.d_points - 1)));
  return out;
}

FamilySearchResult split_advantage(double m, const EnergyParams& params, const FamilyGrid& grid,
                                   const QuadratureSpec& spec) {
  if (!(m > 0.0)) throw ParameterError("mass must be positive");
  params.validate();
  const int n = params.dimension();
  FamilySearchResult res;
  res.mass = m;
  const auto ball = single_ball_energy(m, params, spec);
  res.reference_energy = ball.total;
  res.reference_error = ball.total_error;
  res.warnings = ball.warnings;
  push(res, FamilyMember{"ball", 1, m, 0.0, 0.0}, ball.total, ball.total_error);

  const EnergyParams p0 = without_background(params);
  const double diameter = 2.0 * radius_of_volume(n, m);
  std::uint64_t stream = 100;
  for (double f : grid.fractions) {
    if (!(f > 0.0 && f < 1.0)) throw ParameterError("mass fractions must lie in (0, 1)");
    const double m1 = f * m, m2 = m - m1;
    const auto first = single_ball_energy(m1, params, spec.with_stream(++stream));
    const auto second = single_ball_energy(m2, p0, spec.with_stream(++stream));
    TwoBallConfig cfg{m1, m2, 0.0, n};
    for (double d : distance_grid(cfg.touching(), diameter, grid)) {
      cfg.d = d;
      const auto r = from_parts(cfg, first, second, params, spec.with_stream(++stream));
      push(res, FamilyMember{"two-ball", 2, m1, m2, d}, r.energy.total, r.energy.total_error);
    }
    if (grid.include_far) {
      cfg.d = kInf;
      const auto r = from_parts(cfg, first, second, params, spec);
      push(res, FamilyMember{"two-ball", 2, m1, m2, kInf}, r.energy.total, r.energy.total_error);
    }
  }
  for (int k = 3; k <= grid.max_balls; ++k) {
    const double mk = m / k;
    const auto first = single_ball_energy(mk, params, spec.with_stream(++stream));
    const auto rest = single_ball_energy(mk, p0, spec.with_stream(++stream));
    const double e = first.total + (k - 1) * rest.total;
    const double err = std::hypot(first.total_error, (k - 1) * rest.total_error);
    push(res, FamilyMember{"k-balls", k, mk, mk, kInf}, e, err);
  }
  finish(res);
  return res;
}

SubadditivityReport weak_subadditivity_probe(double m1, double m2, const EnergyParams& params, const FamilyGrid& grid,
                                             const QuadratureSpec& spec) {
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw ParameterError("masses must be positive");
  SubadditivityReport r;
  r.m1 = m1;
  r.m2 = m2;
  r.part_a = split_advantage(m1, params, grid, spec.with_stream(1));
  r.part_0 = split_advantage(m2, without_background(params), grid, spec.with_stream(2));
  r.total = split_advantage(m1 + m2, params, grid, spec.with_stream(3));
  // The union of the two part minimizers, the second moved infinitely far away.
  push(r.total, FamilyMember{"far-union", r.part_a.best.balls + r.part_0.best.balls, m1, m2, kInf},
       r.part_a.best_energy + r.part_0.best_energy, std::hypot(r.part_a.best_error, r.part_0.best_error));
  finish(r.total);
  r.residual = r.total.best_energy - (r.part_a.best_energy + r.part_0.best_energy);
  r.error = std::sqrt(r.total.best_error * r.total.best_error + r.part_a.best_error * r.part_a.best_error +
                      r.part_0.best_error * r.part_0.best_error);
  return r;
}

AnnealResult voxel_local_search(const VoxelShape& e0, const EnergyParams& params, const AnnealSchedule& schedule,
                                std::uint64_t seed) {
  params.validate();
  if (e0.dimension() != 2 || params.dimension() != 2) throw ParameterError("voxel local search is planar (N = 2)");
  if (!(schedule.temperature >= 0.0)) throw ParameterError("temperature must be nonnegative");
  if (!(schedule.ratio > 0.0 && schedule.ratio <= 1.0)) throw ParameterError("cooling ratio must lie in (0, 1]");
  if (schedule.epoch == 0) throw ParameterError("epoch length must be positive");
  AnnealResult res;
  res.best = e0;
  const int nx = e0.dims()[0], ny = e0.dims()[1];
  const std::size_t cells = e0.size();
  if (cells == 0 || e0.count() == 0) return res;
  const double h = e0.spacing();

  // F(S) = sum_{i in S} a_i + sum_{i != j in S} Q(i - j) with Q = -w_K + w_V / 2.
  const Kernel kernel(params.kernel);
  const std::array<int, 3> ext{nx - 1, ny - 1, 0};
  const auto wk = lattice_weights(kernel.profile(), 2, h, ext, true);
  const auto wv = lattice_weights(RadialProfile::power(1.0, -params.alpha), 2, h, ext, false);
  const int qx = 2 * nx - 1;
  std::vector<double> q(static_cast<std::size_t>(qx) * (2 * ny - 1), 0.0);
  for (int b = -(ny - 1); b <= ny - 1; ++b)
    for (int a = -(nx - 1); a <= nx - 1; ++a)
      if (a != 0 || b != 0)
        q[static_cast<std::size_t>(b + ny - 1) * qx + (a + nx - 1)] = -wk->weight(a, b) + 0.5 * wv->weight(a, b);
  auto Q = [&](std::size_t i, std::size_t j) {
    const auto ci = e0.coords(i), cj = e0.coords(j);
    return q[static_cast<std::size_t>(ci[1] - cj[1] + ny - 1) * qx + (ci[0] - cj[0] + nx - 1)];
  };
  std::vector<double> a(cells, wk->cell_complement() + 0.5 * wv->weight(0, 0));
  if (params.A > 0.0) {
    bool singular = false;
    for (std::size_t i = 0; i < cells; ++i) {
      const auto c = e0.coords(i);
      const Vec lo = e0.origin() + Vec(c[0] * h, c[1] * h);
      const auto box = box_power_integral(lo, lo + Vec(h, h), 2, params.beta);
      singular = singular || box.singular;
      a[i] -= params.A * (box.singular ? 0.0 : box.value);
    }
    if (singular) res.warnings.push_back("background: cells at the origin excluded (beta >= N)");
  }

  std::vector<std::uint8_t> x(e0.cells().begin(), e0.cells().end());
  std::vector<std::size_t> occ;
  std::vector<std::size_t> where(cells, 0);
  for (std::size_t i = 0; i < cells; ++i)
    if (x[i]) {
      where[i] = occ.size();
      occ.push_back(i);
    }
  std::vector<double> phi(cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i)
    for (std::size_t j : occ) phi[i] += Q(i, j);
  double energy = 0.0;
  for (std::size_t i : occ) energy += a[i] + phi[i];
  res.initial_energy = res.best_energy = energy;

  Rng rng(seed);
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  auto empty_neighbour = [&](std::size_t i) -> std::ptrdiff_t {
    const auto c = e0.coords(i);
    const int k = static_cast<int>(rng.below(4));
    const int u = c[0] + dx[k], v = c[1] + dy[k];
    if (u < 0 || v < 0 || u >= nx || v >= ny) return -1;
    const std::size_t j = e0.index(u, v);
    return x[j] ? -1 : static_cast<std::ptrdiff_t>(j);
  };
  double temperature = schedule.temperature;
  std::size_t accepted_epoch = 0;
  for (std::size_t step = 1; step <= schedule.steps; ++step) {
    // Remove a surface cell p, add an empty cell q next to the set.
    std::ptrdiff_t p = -1, target = -1;
    for (int tries = 0; tries < 32 && p < 0; ++tries) {
      const std::size_t i = occ[rng.below(occ.size())];
      if (empty_neighbour(i) >= 0) p = static_cast<std::ptrdiff_t>(i);
    }
    for (int tries = 0; tries < 32 && target < 0; ++tries) target = empty_neighbour(occ[rng.below(occ.size())]);
    const double u = rng.uniform();
    if (p >= 0 && target >= 0) {
      const auto ip = static_cast<std::size_t>(p), iq = static_cast<std::size_t>(target);
      const double delta = a[iq] - a[ip] + 2.0 * (phi[iq] - Q(iq, ip)) - 2.0 * phi[ip];
      const bool accept = delta < 0.0 || (temperature > 0.0 && u < std::exp(-delta / temperature));
      if (accept) {
        for (std::size_t i = 0; i < cells; ++i) phi[i] += Q(i, iq) - Q(i, ip);
        x[ip] = 0;
        x[iq] = 1;
        occ[where[ip]] = iq;
        where[iq] = where[ip];
        energy += delta;
        ++res.accepted;
        ++accepted_epoch;
        if (energy < res.best_energy) {
          res.best_energy = energy;
          for (std::size_t i = 0; i < cells; ++i) {
            const auto c = e0.coords(i);
            res.best.set(c[0], c[1], 0, x[i] != 0);
          }
        }
      }
    }
    if (step % schedule.epoch == 0 || step == schedule.steps) {
      res.trace.push_back({step, temperature, energy, res.best_energy, accepted_epoch});
      accepted_epoch = 0;
      if (step % schedule.epoch == 0) temperature *= schedule.ratio;
    }
  }
  return res;
}

}  // namespace droplab
