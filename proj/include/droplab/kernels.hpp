#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "droplab/radial_profile.hpp"
#include "droplab/vec.hpp"

namespace droplab {

enum class KernelKind { fractional, truncated_fractional, tabulated };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// User-facing description of a radial kernel K(x) = k(|x|).
struct KernelSpec {
  KernelKind kind = KernelKind::fractional;
  int dimension = 2;
  double s = 0.5;
  double epsilon = 1.0;
  double lambda = 1.0;
  /// Cap M of the truncated kind, K = min(|x|^{-(N+s)}, M).
  double cap = 1.0;
  /// (radius, value) samples of the tabulated kind, strictly increasing radii.
  std::vector<std::pair<double, double>> table;
};

/// 2^{1/(N+s-1)} - 1, the smallest admissible epsilon.
double epsilon_min(int dimension, double s);

/// Load a two-column (radius, value) CSV; an optional non-numeric header line is skipped.
std::vector<std::pair<double, double>> load_kernel_table(const std::string& path);

/// Validated, immutable kernel. Evaluation is pure and thread-safe.
class Kernel {
public:
  explicit Kernel(KernelSpec spec);

  const KernelSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }

  double operator()(const Vec& x) const;
  double radial(double r) const;

  /// k(r) as a piecewise power law.
  const RadialProfile& profile() const { return profile_; }
  /// Line density k(r) r^{N-1} with its pair potential; empty when the tail is not integrable.
  const std::optional<LineKernel>& line_kernel() const { return line_; }

  bool homogeneous() const { return profile_.homogeneous(); }
  /// Exponent q with K ~ r^{-q} near the origin.
  double singularity_order() const { return -profile_.leading_exponent(); }

private:
  KernelSpec spec_;
  RadialProfile profile_;
  std::optional<LineKernel> line_;
};

double eval_kernel(const Kernel& kernel, const Vec& x);

/// Sampling plan for the numerical audit of the kernel conditions.
struct AuditPlan {
  std::vector<double> radii;                       ///< empty: log-spaced default
  int directions = 16;
  std::vector<std::pair<double, double>> annuli;   ///< empty: default annuli
  int pairs_per_annulus = 200;
  double tail_cutoff = 1e8;
  unsigned long long seed = 1;
};

enum class Verdict { pass, fail, not_checked, inconclusive };
std::string to_string(Verdict v);

struct ConditionResult {
  std::string name;
  Verdict verdict = Verdict::not_checked;
  std::optional<Vec> witness;   ///< always set on fail
  double margin = 0.0;          ///< worst signed margin; negative means violated
  std::string note;
};

struct KernelConditionReport {
  std::vector<ConditionResult> conditions;   ///< K1, K2, K3, K4, K4'
  double tail_partial = 0.0;                 ///< int_1^cutoff k(r) r^{N-1} dr
  double tail_remainder = 0.0;               ///< extrapolated int_cutoff^inf
  const ConditionResult& at(const std::string& name) const;
};

KernelConditionReport validate_conditions(const Kernel& kernel, const AuditPlan& plan = {});

}  // namespace droplab
