#include "droplab/energy.hpp"

#include <cmath>
#include <limits>

#include "droplab/chord.hpp"
#include "droplab/errors.hpp"
#include "droplab/sampling.hpp"

namespace droplab {

void EnergyParams::validate() const {
  Kernel k(kernel);
  const int n = kernel.dimension;
  if (!(A >= 0.0) || !std::isfinite(A)) throw ParameterError("A must be a nonnegative number");
  if (!(alpha > 0.0 && alpha < n)) throw ParameterError("riesz exponent alpha must lie in (0, N)");
  if (!(beta >= 0.0 && beta < n + 1)) throw ParameterError("background exponent beta must lie in [0, N+1)");
}

EnergyReport assemble(const IntegralEstimate& perimeter, const IntegralEstimate& riesz,
                      const IntegralEstimate& background, const EnergyParams& params) {
  EnergyReport r;
  r.perimeter = perimeter;
  r.riesz = riesz;
  r.background = background;
  r.params = params;
  const double attract = params.A == 0.0 ? 0.0 : params.A * background.value;
  const double attract_error = params.A == 0.0 ? 0.0 : params.A * background.error;
  r.total = perimeter.value + riesz.value - attract;
  r.total_error = std::sqrt(perimeter.error * perimeter.error + riesz.error * riesz.error + attract_error * attract_error);
  for (const auto* t : {&perimeter, &riesz, &background})
    for (const auto& w : t->warnings) r.warnings.push_back(w);
  if (params.alpha != 1.0) r.warnings.push_back("alpha != 1: exploratory, outside the threshold results");
  return r;
}

IntegralEstimate perimeter(const Shape& e, const Kernel& kernel, const QuadratureSpec& spec) {
  if (kernel.dimension() != e.dimension()) throw ParameterError("kernel and shape dimensions differ");
  return radial_complement_integral(e, kernel.profile(), spec);
}

IntegralEstimate perimeter(const Shape& e, const EnergyParams& params, const QuadratureSpec& spec) {
  return perimeter(e, Kernel(params.kernel), spec);
}

IntegralEstimate riesz(const Shape& e, double alpha, const QuadratureSpec& spec) {
  if (!(alpha > 0.0 && alpha < e.dimension()))
    throw ParameterError("riesz exponent must lie in (0, N); the self-energy diverges otherwise");
  return scaled(radial_self_integral(e, RadialProfile::power(1.0, -alpha), spec), 0.5);
}

IntegralEstimate background(const Shape& e, double beta, const QuadratureSpec& spec) {
  if (!(beta >= 0.0 && beta < e.dimension() + 1))
    throw ParameterError("background exponent must lie in [0, N+1)");
  return power_integral(e, beta, spec);
}

EnergyReport total_energy(const Shape& e, const EnergyParams& params, const QuadratureSpec& spec) {
  params.validate();
  if (params.dimension() != e.dimension()) throw ParameterError("kernel and shape dimensions differ");
  const auto p = perimeter(e, params, spec.with_stream(1));
  const auto v = riesz(e, params.alpha, spec.with_stream(2));
  IntegralEstimate r;
  try {
    r = background(e, params.beta, spec.with_stream(3));
  } catch (const DomainError& err) {
    // The term is multiplied by A; with A = 0 a divergent background does not enter the energy.
    if (params.A != 0.0) throw;
    r.value = std::numeric_limits<double>::infinity();
    r.method = "divergent";
    r.warnings.push_back(err.what());
  }
  return assemble(p, v, r, params);
}

PairWeight PairWeight::kernel(const Kernel& k) { return {k.profile(), "kernel"}; }

PairWeight PairWeight::riesz(double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("riesz exponent must be positive");
  return {RadialProfile::power(1.0, -alpha), "riesz"};
}

namespace {

double scale_of(const Shape& u) {
  if (u.trivially_empty()) return 0.0;
  return volume(u);
}

void require_disjoint(const Shape& u, const Shape& w) {
  if (u.trivially_empty() || w.trivially_empty()) return;
  const double overlap = overlap_volume(u, w);
  if (overlap > 1e-9 * std::max(scale_of(u), scale_of(w)))
    throw PreconditionError("interaction requires sets with null intersection (overlap volume " +
                            std::to_string(overlap) + ")");
}

bool chord_engine(const Shape& s, const QuadratureSpec& spec) {
  if (spec.method != QuadratureMethod::monte_carlo || spec.sampler != Sampler::chord) return false;
  if (s.trivially_empty()) return false;
  if (!spec.exact_balls || !s.plain_balls()) return true;
  const auto& b = s.balls().balls();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (norm(b[i].center - b[j].center) < (b[i].radius + b[j].radius) * (1.0 - 1e-12)) return true;
  return false;
}

Intervals merged(const Intervals& a, const Intervals& b) {
  Intervals all = a;
  all.insert(all.end(), b.begin(), b.end());
  return merge_intervals(std::move(all));
}

// Residual of an identity from its terms: errors in quadrature plus a rounding floor.
Residual finish(double residual, std::vector<IntegralEstimate> terms, const std::vector<double>& weights) {
  Residual r;
  r.residual = residual;
  double var = 0.0, magnitude = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    var += weights[i] * weights[i] * terms[i].error * terms[i].error;
    magnitude += std::abs(weights[i] * terms[i].value);
  }
  r.error = std::sqrt(var) + 1e-12 * magnitude;
  r.terms = std::move(terms);
  return r;
}

// Four chord estimates on shared lines; the per-line residual is accumulated directly, so its
// standard error reflects the correlated terms instead of their independent sum.
struct PairedLines {
  IntegralEstimate terms[4];
  IntegralEstimate residual;
};

template <class F>
PairedLines paired_lines(const Shape& u, const Shape& w, const QuadratureSpec& spec, F&& per_line) {
  const int n = u.dimension();
  const Frame frame = enclosing_frame(u.frame(), w.frame());
  LineSampler sampler(n, frame, spec.seed);
  Accumulator acc[5];
  for (std::size_t i = 0; i < spec.budget; ++i) {
    const auto line = sampler.next();
    const auto a = u.line_intervals(line.origin, line.dir);
    const auto b = w.line_intervals(line.origin, line.dir);
    double t[4];
    per_line(a, b, t);
    for (int k = 0; k < 4; ++k) acc[k].add(t[k]);
    acc[4].add(t[0] + t[1] - t[2] - t[3]);
  }
  const double scale = 0.5 * sampler.measure();
  PairedLines out;
  for (int k = 0; k < 5; ++k) {
    IntegralEstimate& e = k < 4 ? out.terms[k] : out.residual;
    e.value = scale * acc[k].mean();
    e.error = scale * acc[k].stderr_of_mean();
    e.samples = spec.budget;
    e.seed = spec.seed;
    e.method = "monte-carlo/chord";
  }
  return out;
}

}  // namespace

IntegralEstimate interaction(const Shape& u, const Shape& w, const PairWeight& g, const QuadratureSpec& spec) {
  if (u.dimension() != w.dimension()) throw ParameterError("shapes of different dimension");
  if (u.trivially_empty() || w.trivially_empty()) return exact_zero();
  require_disjoint(u, w);
  return radial_cross_integral(u, w, g.profile, spec);
}

Residual check_perimeter_decomposition(const Shape& u, const Shape& w, const Kernel& kernel, const QuadratureSpec& spec) {
  spec.validate();
  if (u.trivially_empty() || w.trivially_empty()) return Residual{};
  require_disjoint(u, w);
  if (chord_engine(u, spec) || chord_engine(w, spec)) {
    const LineKernel kappa = line_density(kernel.profile(), u.dimension());
    const auto r = paired_lines(u, w, spec, [&](const Intervals& a, const Intervals& b, double* t) {
      t[0] = line_complement_sum(kappa, a);
      t[1] = line_complement_sum(kappa, b);
      t[2] = line_complement_sum(kappa, merged(a, b));
      t[3] = a.empty() || b.empty() ? 0.0 : 2.0 * line_cross_sum(kappa, a, b);
    });
    Residual out;
    out.residual = r.residual.value;
    double magnitude = 0.0;
    for (const auto& t : r.terms) magnitude += std::abs(t.value);
    out.error = r.residual.error + 1e-12 * magnitude;
    out.terms = {r.terms[0], r.terms[1], r.terms[2], scaled(r.terms[3], 0.5)};
    return out;
  }
  const Shape both = unite(u, w);
  const auto pu = perimeter(u, kernel, spec.with_stream(11));
  const auto pw = perimeter(w, kernel, spec.with_stream(12));
  const auto puw = perimeter(both, kernel, spec.with_stream(13));
  const auto i = interaction(u, w, PairWeight::kernel(kernel), spec.with_stream(14));
  return finish(pu.value + pw.value - puw.value - 2.0 * i.value, {pu, pw, puw, i}, {1.0, 1.0, -1.0, -2.0});
}

Residual check_riesz_decomposition(const Shape& u, const Shape& w, const QuadratureSpec& spec, double alpha) {
  spec.validate();
  if (u.trivially_empty() || w.trivially_empty()) return Residual{};
  require_disjoint(u, w);
  if (chord_engine(u, spec) || chord_engine(w, spec)) {
    const LineKernel kappa = line_density(RadialProfile::power(1.0, -alpha), u.dimension());
    // Terms ordered so that t0 + t1 - t2 - t3 = V(U cup W) - V(U) - V(W) - I.
    const auto r = paired_lines(u, w, spec, [&](const Intervals& a, const Intervals& b, double* t) {
      t[0] = 0.5 * line_self_sum(kappa, merged(a, b));
      t[1] = 0.0;
      t[2] = 0.5 * (line_self_sum(kappa, a) + line_self_sum(kappa, b));
      t[3] = a.empty() || b.empty() ? 0.0 : line_cross_sum(kappa, a, b);
    });
    Residual out;
    out.residual = r.residual.value;
    double magnitude = 0.0;
    for (const auto& t : r.terms) magnitude += std::abs(t.value);
    out.error = r.residual.error + 1e-12 * magnitude;
    out.terms = {r.terms[0], r.terms[2], r.terms[3]};
    return out;
  }
  const Shape both = unite(u, w);
  const auto vuw = riesz(both, alpha, spec.with_stream(21));
  const auto vu = riesz(u, alpha, spec.with_stream(22));
  const auto vw = riesz(w, alpha, spec.with_stream(23));
  const auto i = interaction(u, w, PairWeight::riesz(alpha), spec.with_stream(24));
  return finish(vuw.value - vu.value - vw.value - i.value, {vuw, vu, vw, i}, {1.0, -1.0, -1.0, -1.0});
}

ScalingReport scaling_report(const Shape& e, double lambda, const EnergyParams& params, const QuadratureSpec& spec) {
  if (!(lambda > 0.0)) throw ParameterError("scaling factor must be positive");
  params.validate();
  const Kernel kernel(params.kernel);
  const int n = e.dimension();
  ScalingReport r;
  r.lambda = lambda;
  r.perimeter_expected = n - params.kernel.s;
  r.riesz_expected = 2.0 * n - params.alpha;
  r.background_expected = n - params.beta;
  r.perimeter_exact = kernel.homogeneous();
  if (!r.perimeter_exact)
    r.warnings.push_back("kernel is not homogeneous: the perimeter exponent N - s is not exact");
  r.base = total_energy(e, params, spec);
  if (lambda == 1.0) {
    r.dilated = r.base;
    r.perimeter_exponent = r.perimeter_expected;
    r.riesz_exponent = r.riesz_expected;
    r.background_exponent = r.background_expected;
    return r;
  }
  const ScaleResult scaled_shape = scale(e, lambda);
  if (scaled_shape.resampling_error > 0.0)
    r.warnings.push_back("voxel resampling changed the volume by " + std::to_string(scaled_shape.resampling_error));
  r.dilated = total_energy(scaled_shape.shape, params, spec);
  const double log_lambda = std::log(lambda);
  auto fit = [&](const IntegralEstimate& a, const IntegralEstimate& b, double& exponent, double& error) {
    if (!(a.value > 0.0) || !(b.value > 0.0)) {
      exponent = std::nan("");
      error = std::nan("");
      return;
    }
    exponent = std::log(b.value / a.value) / log_lambda;
    error = std::hypot(a.error / a.value, b.error / b.value) / std::abs(log_lambda);
  };
  fit(r.base.perimeter, r.dilated.perimeter, r.perimeter_exponent, r.perimeter_error);
  fit(r.base.riesz, r.dilated.riesz, r.riesz_exponent, r.riesz_error);
  fit(r.base.background, r.dilated.background, r.background_exponent, r.background_error);
  return r;
}

}  // namespace droplab
