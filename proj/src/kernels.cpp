#include "droplab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "droplab/errors.hpp"
#include "droplab/gauss.hpp"

namespace droplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RadialProfile tabulated_profile(const std::vector<std::pair<double, double>>& table) {
  if (table.size() < 2) throw ParameterError("tabulated kernel needs at least two samples");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto [r, v] = table[i];
    if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("tabulated radii must be positive and finite");
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("tabulated kernel values must be nonnegative");
    if (i > 0 && !(r > table[i - 1].first)) throw ParameterError("tabulated radii must be strictly increasing");
  }
  // Log-log linear segments; the first and last segments extend to 0 and infinity.
  auto segment = [&](std::size_t i) {
    const auto [r0, v0] = table[i];
    const auto [r1, v1] = table[i + 1];
    if (v0 == 0.0 || v1 == 0.0) return std::pair{0.0, 0.0};
    const double expo = std::log(v1 / v0) / std::log(r1 / r0);
    return std::pair{v0 / std::pow(r0, expo), expo};
  };
  std::vector<RadialProfile::Piece> pieces;
  const std::size_t last = table.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const auto [coef, expo] = segment(i);
    const double lo = i == 0 ? 0.0 : table[i].first;
    const double hi = i + 1 == last ? kInf : table[i + 1].first;
    pieces.push_back({lo, hi, coef, expo});
  }
  return RadialProfile(std::move(pieces));
}

RadialProfile build_profile(const KernelSpec& spec) {
  const double order = spec.dimension + spec.s;
  switch (spec.kind) {
    case KernelKind::fractional:
      return RadialProfile::power(1.0, -order);
    case KernelKind::truncated_fractional: {
      const double knee = std::pow(spec.cap, -1.0 / order);
      return RadialProfile({{0.0, knee, spec.cap, 0.0}, {knee, kInf, 1.0, -order}});
    }
    case KernelKind::tabulated:
      return tabulated_profile(spec.table);
  }
  throw ParameterError("unknown kernel kind");
}

Vec random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v;
  double len = 0.0;
  do {
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    len = norm(v);
  } while (len < 1e-12);
  return v * (1.0 / len);
}

ConditionResult make_result(std::string name) {
  ConditionResult r;
  r.name = std::move(name);
  r.verdict = Verdict::pass;
  r.margin = kInf;
  return r;
}

// Tracks the worst relative margin; a negative margin beyond rounding marks a violation.
void record(ConditionResult& res, double margin, const Vec& at) {
  if (margin < res.margin) {
    res.margin = margin;
    if (margin < -1e-12) {
      res.verdict = Verdict::fail;
      res.witness = at;
    }
  }
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::fractional: return "fractional";
    case KernelKind::truncated_fractional: return "truncated-fractional";
    case KernelKind::tabulated: return "tabulated";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "fractional") return KernelKind::fractional;
  if (name == "truncated-fractional") return KernelKind::truncated_fractional;
  if (name == "tabulated") return KernelKind::tabulated;
  throw ConfigError("unknown kernel kind '" + name + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_checked: return "not-checked";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

double epsilon_min(int dimension, double s) {
  if (dimension < 2) throw ParameterError("dimension must be at least 2");
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0, 1)");
  const long double e = std::pow(2.0L, 1.0L / (dimension + static_cast<long double>(s) - 1.0L)) - 1.0L;
  return static_cast<double>(e);
}

std::vector<std::pair<double, double>> load_kernel_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot open kernel table '" + path + "'");
  std::vector<std::pair<double, double>> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double r = 0.0, v = 0.0;
    if (!(is >> r >> v)) {
      if (lineno == 1) continue;
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'radius,value'");
    }
    table.emplace_back(r, v);
  }
  return table;
}

Kernel::Kernel(KernelSpec spec) : spec_(std::move(spec)) {
  if (spec_.dimension < 2) throw ParameterError("kernel dimension must be at least 2");
  if (!(spec_.s > 0.0 && spec_.s < 1.0)) throw ParameterError("s must lie in (0, 1)");
  if (!(spec_.epsilon > epsilon_min(spec_.dimension, spec_.s)))
    throw ParameterError("epsilon must exceed 2^{1/(N+s-1)} - 1");
  if (!(spec_.lambda >= 1.0)) throw ParameterError("lambda must be at least 1");
  if (spec_.kind == KernelKind::truncated_fractional &&
      !(spec_.cap >= std::pow(1.0 + spec_.epsilon, -(spec_.dimension + spec_.s))))
    throw ParameterError("cap must be at least (1+epsilon)^{-(N+s)}");
  profile_ = build_profile(spec_);
  try {
    line_.emplace(profile_.times_power(spec_.dimension - 1));
  } catch (const ParameterError&) {
    line_.reset();
  }
}

double Kernel::radial(double r) const {
  if (!(r > 0.0)) throw DomainError("kernel is singular at the origin");
  return profile_(r);
}

double Kernel::operator()(const Vec& x) const { return radial(norm(x)); }

double eval_kernel(const Kernel& kernel, const Vec& x) { return kernel(x); }

const ConditionResult& KernelConditionReport::at(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("no condition named " + name);
}

KernelConditionReport validate_conditions(const Kernel& kernel, const AuditPlan& plan) {
  const int n = kernel.dimension();
  const double s = kernel.spec().s;
  const double eps = kernel.spec().epsilon;
  const double lambda = kernel.spec().lambda;
  const double order = n + s;
  const double knee = 1.0 + eps;

  std::vector<double> radii = plan.radii;
  if (radii.empty()) {
    for (int i = 0; i <= 240; ++i) radii.push_back(std::pow(10.0, -3.0 + 6.0 * i / 240.0));
    radii.push_back(knee * (1.0 - 1e-9));
    radii.push_back(knee);
    radii.push_back(knee * (1.0 + 1e-9));
    std::sort(radii.begin(), radii.end());
  }
  std::mt19937_64 rng(plan.seed);
  std::vector<Vec> dirs;
  for (int i = 0; i < std::max(1, plan.directions); ++i) dirs.push_back(random_direction(n, rng));

  KernelConditionReport report;

  // (K1): nonnegativity and evenness.
  auto k1 = make_result("K1");
  for (double r : radii)
    for (const auto& d : dirs) {
      const Vec x = d * r;
      const double a = kernel(x);
      const double b = kernel(-x);
      record(k1, a, x);
      const double scale = std::max(std::abs(a), std::numeric_limits<double>::min());
      record(k1, -std::abs(a - b) / scale, x);
    }
  if (k1.verdict == Verdict::pass) k1.margin = 0.0;

  // (K2): int_1^cutoff k(r) r^{N-1} dr in log-radius, plus an extrapolated remainder.
  auto k2 = make_result("K2");
  auto density = [&](double r) { return kernel.radial(r) * std::pow(r, n - 1); };
  const double cutoff = plan.tail_cutoff;
  const double log_span = std::log(cutoff);
  const int panels = std::max(4, static_cast<int>(std::ceil(log_span / std::log(10.0))) * 8);
  report.tail_partial = integrate_gauss([&](double u) { return density(std::exp(u)) * std::exp(u); },
                                        0.0, log_span, 16, panels);
  const double local_slope = std::log(density(cutoff) / density(cutoff / 10.0)) / std::log(10.0);
  if (density(cutoff) == 0.0) {
    report.tail_remainder = 0.0;
    k2.margin = 1.0;
  } else if (!(local_slope < -1.0)) {
    report.tail_remainder = kInf;
    k2.verdict = Verdict::fail;
    k2.witness = unit(0) * cutoff;
    k2.margin = -(local_slope + 1.0);
    k2.note = "radial density decays no faster than 1/r; tail integral diverges";
  } else {
    report.tail_remainder = density(cutoff) * cutoff / (-local_slope - 1.0);
    k2.margin = 1.0 - report.tail_remainder / (0.01 * report.tail_partial);
    if (report.tail_remainder > 0.01 * report.tail_partial) {
      k2.verdict = Verdict::inconclusive;
      k2.note = "extrapolated remainder exceeds 1% of the partial integral";
    }
  }

  // (K3): difference quotients on annuli against 10x the fractional Lipschitz constant.
  auto k3 = make_result("K3");
  auto annuli = plan.annuli;
  if (annuli.empty()) annuli = {{0.05, 0.1}, {0.5, 1.0}, {1.0, 2.0}, {2.0, 10.0}};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& [r1, r2] : annuli) {
    if (!(r1 > 0.0 && r2 > r1)) throw ParameterError("annuli must satisfy 0 < r1 < r2");
    const double threshold = 10.0 * order * std::pow(r1, -(order + 1.0));
    for (int i = 0; i < plan.pairs_per_annulus; ++i) {
      const double r = r1 + (r2 - r1) * unif(rng);
      const Vec x = random_direction(n, rng) * r;
      const Vec y = x + random_direction(n, rng) * (1e-3 * r1);
      const double ry = norm(y);
      if (ry < r1 || ry > r2) continue;
      const double quotient = std::abs(kernel(x) - kernel(y)) / norm(x - y);
      record(k3, (threshold - quotient) / threshold, x);
    }
  }

  // (K4) and (K4'): pointwise sandwich bounds inside and outside radius 1 + epsilon.
  auto k4 = make_result("K4");
  auto k4p = make_result("K4'");
  const double tail_k4 = std::pow(knee, -(order - 1.0));
  const double tail_k4p = std::pow(knee, -order);
  for (double r : radii) {
    const double v = kernel.radial(r);
    const double frac = std::pow(r, -order);
    const Vec at = dirs.front() * r;
    if (r < knee) {
      record(k4, (frac - v) / frac, at);
      record(k4p, (v - frac) / frac, at);
      record(k4p, (lambda * frac - v) / (lambda * frac), at);
    } else {
      record(k4, (tail_k4 - r * v) / tail_k4, at);
      record(k4p, (v - frac) / frac, at);
      record(k4p, (tail_k4p - v) / tail_k4p, at);
    }
  }

  report.conditions = {k1, k2, k3, k4, k4p};
  return report;
}

}  // namespace droplab
