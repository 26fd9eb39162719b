#include "droplab/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "droplab/energy.hpp"
#include "droplab/errors.hpp"
#include "droplab/families.hpp"
#include "droplab/isoperimetry.hpp"
#include "droplab/kernels.hpp"
#include "droplab/sampling.hpp"
#include "droplab/slicing.hpp"
#include "droplab/thresholds.hpp"

namespace droplab::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<KeyDoc>& documented_keys() {
  static const std::vector<KeyDoc> keys = {
      {"seed", "1", "base seed of every random stream"},
      {"out", "", "output directory (default: $DROPLAB_OUTPUT_DIR, else droplab-out)"},
      // kernel
      {"kind", "fractional", "kernel kind: fractional, truncated-fractional, tabulated"},
      {"N", "2", "dimension (2 or 3)"},
      {"s", "0.5", "fractional order in (0, 1)"},
      {"epsilon", "1", "kernel condition radius parameter"},
      {"lambda", "1", "upper sandwich constant of the kernel (>= 1)"},
      {"cap", "1", "cap M of the truncated kernel"},
      {"table", "", "two-column CSV (radius, value) of a tabulated kernel"},
      // energy
      {"A", "0", "background strength (>= 0)"},
      {"alpha", "1", "riesz exponent in (0, N); values other than 1 are exploratory"},
      {"beta", "1", "background exponent in [0, N+1)"},
      // quadrature
      {"method", "monte-carlo", "quadrature method: monte-carlo, tensor-midpoint"},
      {"budget", "100000", "samples (lines, rays, pairs or sphere nodes); at least 1000"},
      {"near_diagonal", "pair-offset", "coincident cells of generic tensor integrals: skip-and-bound, pair-offset"},
      {"sampler", "chord", "monte-carlo double integrals: chord, pair"},
      {"grid_cells", "64", "cells along the longest axis when a non-voxel shape is gridded"},
      {"exact_balls", "true", "uncut ball configurations use radial quadrature"},
      // shape
      {"shape", "", "shape file: ball CSV (.csv) or voxel grid; empty: use shape.generator"},
      {"shape.generator", "ball", "ball, two-ball, blob or empty"},
      {"shape.mass", "1", "ball mass (ball generator)"},
      {"shape.m1", "1", "mass of the ball at the origin (two-ball generator)"},
      {"shape.m2", "1", "mass of the second ball (two-ball generator)"},
      {"shape.d", "4", "centre distance (two-ball generator)"},
      {"shape.seed", "1", "seed of the blob generator"},
      {"shape.spacing", "0", "voxelize generated shapes at this spacing; 0 keeps them exact"},
      // thresholds
      {"convention", "theorem", "exponent of (1+epsilon) in C1: theorem (N+s-1) or appendix (N+1-s)"},
      {"threshold", "closed-form", "critical-mass record: closed-form (m_c) or root (m_p, uses beta)"},
      {"bracket_lower", "1e-6", "initial lower bracket of the root finder"},
      {"bracket_upper", "1", "initial upper bracket of the root finder"},
      // slicing
      {"directions", "0", "number of cut directions; 0: 16 (N = 2) or 64 (N = 3)"},
      {"offsets", "64", "cut offsets per direction"},
      {"padding", "0.1", "offset grid padding as a fraction of the extent"},
      {"mass_bound", "true", "also run the averaged mass bound in slice-scan"},
      // families
      {"family.mode", "split", "split (split_advantage), probe (weak subadditivity) or anneal"},
      {"family.mass", "1", "total mass of the split search"},
      {"family.fractions", "0.5,0.4,0.3,0.2,0.1", "values of m1 / m"},
      {"family.d_points", "10", "log-spaced centre distances"},
      {"family.d_max_factor", "1000", "largest distance in reference diameters"},
      {"family.include_far", "true", "add the infinitely separated pair"},
      {"family.max_balls", "2", "far-separated equal k-ball members up to this k"},
      {"family.m1", "1", "first mass of the subadditivity probe"},
      {"family.m2", "1", "second mass of the subadditivity probe"},
      {"anneal.steps", "1000", "pair-swap steps"},
      {"anneal.temperature", "0", "initial temperature"},
      {"anneal.ratio", "0.95", "geometric cooling factor per epoch"},
      {"anneal.epoch", "100", "steps per epoch"},
      // verify
      {"verify.pairs", "5", "random disjoint voxel pairs of the identity suite"},
      {"verify.grid", "32", "cells per axis of those pairs"},
      {"verify.shapes", "10", "random blobs of the isoperimetry suite"},
      {"verify.points", "20", "random points per dimension of the sphere-integral suite"},
      {"verify.lambda", "2", "dilation factor of the scaling suite"},
      // kernel-check
      {"audit.directions", "16", "directions per radius"},
      {"audit.pairs", "200", "point pairs per annulus"},
      {"audit.tail_cutoff", "1e8", "radius where the tail integral is extrapolated"},
  };
  return keys;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"energy", "critical-mass", "slice-scan", "family", "verify",
                                                 "kernel-check"};
  return names;
}

namespace {

const KeyDoc* find_key(const std::string& key) {
  for (const auto& k : documented_keys())
    if (key == k.name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Shortest round-trip formatting, identical on every run.
std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (c.values_.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) { values_[trim(key)] = trim(value); }

void ExperimentConfig::check_keys() const {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : values_)
    if (!find_key(k)) unknown.push_back(k);
  if (unknown.empty()) return;
  std::string msg = "unknown configuration keys:";
  for (const auto& k : unknown) msg += " " + k;
  throw ConfigError(msg);
}

std::string ExperimentConfig::get(const std::string& key) const {
  const KeyDoc* doc = find_key(key);
  if (!doc) throw ConfigError("undocumented configuration key '" + key + "'");
  const auto it = values_.find(key);
  return it == values_.end() ? doc->fallback : it->second;
}

double ExperimentConfig::number(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  }
}

long long ExperimentConfig::integer(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool ExperimentConfig::flag(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> ExperimentConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' expects a comma-separated list of numbers");
    }
  }
  return out;
}

std::string ExperimentConfig::resolved() const {
  std::vector<std::string> names;
  for (const auto& k : documented_keys()) names.emplace_back(k.name);
  std::sort(names.begin(), names.end());
  std::string out;
  for (const auto& k : names) out += k + " = " + get(k) + "\n";
  return out;
}

std::string ExperimentConfig::hash() const {
  std::string text;
  std::istringstream in(resolved());
  for (std::string line; std::getline(in, line);)
    if (line.rfind("out =", 0) != 0) text += line + "\n";
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

std::string output_directory(const ExperimentConfig& config) {
  const std::string out = config.get("out");
  if (!out.empty()) return out;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "droplab-out";
}

namespace {

// ---------------------------------------------------------------- config -> objects

KernelSpec kernel_spec(const ExperimentConfig& c) {
  KernelSpec k;
  k.kind = kernel_kind_from_string(c.get("kind"));
  k.dimension = static_cast<int>(c.integer("N"));
  k.s = c.number("s");
  k.epsilon = c.number("epsilon");
  k.lambda = c.number("lambda");
  k.cap = c.number("cap");
  if (k.kind == KernelKind::tabulated) {
    if (c.get("table").empty()) throw ConfigError("tabulated kernels need the 'table' key");
    k.table = load_kernel_table(c.get("table"));
  }
  return k;
}

EnergyParams energy_params(const ExperimentConfig& c) {
  EnergyParams p;
  p.kernel = kernel_spec(c);
  p.A = c.number("A");
  p.alpha = c.number("alpha");
  p.beta = c.number("beta");
  p.validate();
  return p;
}

QuadratureSpec quadrature_spec(const ExperimentConfig& c) {
  QuadratureSpec q;
  q.method = quadrature_method_from_string(c.get("method"));
  const long long budget = c.integer("budget");
  if (budget < 0) throw ConfigError("budget must be nonnegative");
  q.budget = static_cast<std::size_t>(budget);
  q.seed = static_cast<std::uint64_t>(c.integer("seed"));
  q.near_diagonal = near_diagonal_from_string(c.get("near_diagonal"));
  q.sampler = sampler_from_string(c.get("sampler"));
  q.grid_cells = static_cast<int>(c.integer("grid_cells"));
  q.exact_balls = c.flag("exact_balls");
  q.validate();
  return q;
}

Shape make_shape(const ExperimentConfig& c) {
  const int n = static_cast<int>(c.integer("N"));
  const std::string path = c.get("shape");
  if (!path.empty()) {
    if (!fs::exists(path)) throw PathError("shape file '" + path + "' does not exist");
    const Shape s = load_shape(path, n);
    if (s.dimension() != n) throw ConfigError("shape file dimension differs from N");
    return s;
  }
  const std::string gen = c.get("shape.generator");
  Shape s;
  if (gen == "empty") return Shape::empty(n);
  if (gen == "ball") {
    s = Shape(ball_of_volume(n, c.number("shape.mass")));
  } else if (gen == "two-ball") {
    const TwoBallConfig cfg{c.number("shape.m1"), c.number("shape.m2"), c.number("shape.d"), n};
    s = Shape(cfg.balls());
  } else if (gen == "blob") {
    const double cap = isoperimetric_volume_cap(n, c.number("epsilon"));
    return Shape(random_blob(n, static_cast<std::uint64_t>(c.integer("shape.seed")), cap));
  } else {
    throw ConfigError("unknown shape.generator '" + gen + "' (ball, two-ball, blob, empty)");
  }
  const double h = c.number("shape.spacing");
  if (h < 0.0) throw ConfigError("shape.spacing must be nonnegative");
  if (h > 0.0) return Shape(voxelize(s, h));
  return s;
}

// ---------------------------------------------------------------- serialization

json to_json(const IntegralEstimate& e) {
  json j;
  j["value"] = num(e.value);
  j["error"] = num(e.error);
  j["samples"] = e.samples;
  j["seed"] = e.seed;
  j["method"] = e.method;
  if (!e.warnings.empty()) j["warnings"] = e.warnings;
  return j;
}

json to_json(const EnergyReport& r) {
  json j;
  j["perimeter"] = to_json(r.perimeter);
  j["riesz"] = to_json(r.riesz);
  j["background"] = to_json(r.background);
  j["total"] = num(r.total);
  j["total_error"] = num(r.total_error);
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const ThresholdRecord& r) {
  json j;
  j["N"] = r.dimension;
  j["s"] = r.s;
  j["epsilon"] = r.epsilon;
  j["A"] = r.A;
  j["beta"] = r.beta;
  j["convention"] = to_string(r.convention);
  j["kind"] = r.kind;
  j[r.kind == "root" ? "m_p" : "m_c"] = num(r.mass);
  j["C1"] = num(r.constants.c1);
  j["C2"] = num(r.constants.c2);
  j["C3"] = num(r.constants.c3);
  j["p"] = num(r.constants.p);
  if (r.kind == "root") {
    j["diagnostics"] = {{"bracket", {num(r.bracket_lo), num(r.bracket_hi)}},
                        {"iterations", r.iterations},
                        {"residual", num(r.residual)},
                        {"residual_scale", num(r.residual_scale)},
                        {"phi_at_2m", num(r.phi_at_2m)},
                        {"phi_at_10m", num(r.phi_at_10m)}};
  }
  return j;
}

json vec_json(const Vec& v, int n) {
  json j = json::array();
  for (int k = 0; k < n; ++k) j.push_back(v[k]);
  return j;
}

json to_json(const FamilyMember& m) {
  return {{"kind", m.kind}, {"balls", m.balls}, {"m1", num(m.m1)}, {"m2", num(m.m2)}, {"d", num(m.d)}};
}

json to_json(const FamilySearchResult& r) {
  json j;
  j["mass"] = num(r.mass);
  j["best"] = to_json(r.best);
  j["best_energy"] = num(r.best_energy);
  j["best_error"] = num(r.best_error);
  j["reference_energy"] = num(r.reference_energy);
  j["reference_error"] = num(r.reference_error);
  j["margin"] = num(r.margin);
  j["margin_error"] = num(r.margin_error);
  j["warnings"] = r.warnings;
  return j;
}

/// Writes result files into one directory; every file carries the schema version and config hash.
class Writer {
public:
  Writer(const ExperimentConfig& c, std::string sub) : config_(c), sub_(std::move(sub)), dir_(output_directory(c)) {
    fs::create_directories(dir_);
    write_text(sub_ + ".config", "# schema_version = " + std::to_string(kSchemaVersion) + "\n# config_hash = " +
                                     config_.hash() + "\n" + config_.resolved());
  }

  json envelope() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["subcommand"] = sub_;
    j["config_hash"] = config_.hash();
    j["seed"] = config_.integer("seed");
    json cfg;
    std::istringstream in(config_.resolved());
    for (std::string line; std::getline(in, line);) {
      const auto eq = line.find(" = ");
      cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;
    return j;
  }

  /// CSV with a leading comment line identifying the run.
  void write_csv(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
    std::string text = "# schema_version=" + std::to_string(kSchemaVersion) + " config_hash=" + config_.hash() +
                       " seed=" + config_.get("seed") + "\n" + header + "\n";
    for (const auto& r : rows) text += r + "\n";
    write_text(name, text);
  }

  void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

  void write_text(const std::string& name, const std::string& text) {
    const fs::path p = fs::path(dir_) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw PathError("cannot write '" + p.string() + "'");
    out << text;
    files_.push_back(p.string());
  }

  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
  const std::vector<std::string>& files() const { return files_; }

private:
  const ExperimentConfig& config_;
  std::string sub_;
  std::string dir_;
  std::vector<std::string> files_;
};

std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string estimate_row(const std::string& name, const IntegralEstimate& e) {
  return row({name, fmt(e.value), fmt(e.error), std::to_string(e.samples), std::to_string(e.seed), e.method});
}

// ---------------------------------------------------------------- subcommands

int run_energy(const ExperimentConfig& c, Writer& w, json& summary) {
  const auto params = energy_params(c);
  const auto spec = quadrature_spec(c);
  const Shape shape = make_shape(c);
  const auto rep = total_energy(shape, params, spec);
  w.write_csv("energy.csv", "term,value,error,samples,seed,method",
              {estimate_row("perimeter", rep.perimeter), estimate_row("riesz", rep.riesz),
               estimate_row("background", rep.background),
               row({"total", fmt(rep.total), fmt(rep.total_error), "", "", "assembled"})});
  summary["volume"] = shape.trivially_empty() ? 0.0 : volume(shape);
  summary["energy"] = to_json(rep);
  return ok;
}

int run_critical_mass(const ExperimentConfig& c, Writer& w, json& summary, std::ostream& out) {
  const KernelSpec k = kernel_spec(c);
  const Convention conv = convention_from_string(c.get("convention"));
  const std::string kind = c.get("threshold");
  ThresholdRecord r;
  if (kind == "closed-form") {
    r = critical_mass(k.dimension, k.s, k.epsilon, c.number("A"), conv);
  } else if (kind == "root") {
    r = general_critical_mass(k.dimension, k.s, k.epsilon, c.number("A"), c.number("beta"), conv,
                              BracketStart{c.number("bracket_lower"), c.number("bracket_upper")});
  } else {
    throw ConfigError("threshold must be closed-form or root");
  }
  const std::string header = "N,s,epsilon,A,beta,convention,kind,mass,C1,C2,C3,p,iterations,residual";
  const std::string line =
      row({std::to_string(r.dimension), fmt(r.s), fmt(r.epsilon), fmt(r.A), fmt(r.beta), to_string(r.convention),
           r.kind, fmt(r.mass), fmt(r.constants.c1), fmt(r.constants.c2), fmt(r.constants.c3), fmt(r.constants.p),
           std::to_string(r.iterations), fmt(r.residual)});
  w.write_csv("critical-mass.csv", header, {line});
  summary["threshold"] = to_json(r);
  out << summary["threshold"].dump() << "\n" << line << "\n";
  return ok;
}

int run_slice_scan(const ExperimentConfig& c, Writer& w, json& summary) {
  const auto params = energy_params(c);
  const auto spec = quadrature_spec(c);
  const Shape shape = make_shape(c);
  const int n = shape.dimension();
  SliceGrid grid;
  grid.directions = default_directions(n, static_cast<int>(c.integer("directions")));
  grid.offset_points = static_cast<int>(c.integer("offsets"));
  grid.padding = c.number("padding");
  const auto res = scan(shape, params, grid, spec);
  std::string header = n == 2 ? "nu_x,nu_y" : "nu_x,nu_y,nu_z";
  header += ",l,lhs,lhs_error,kernel_cross,kernel_cross_error,background,background_error,rhs,rhs_error,defect,"
            "defect_error";
  std::vector<std::string> rows;
  for (const auto& r : res.records) {
    std::string line;
    for (int k = 0; k < n; ++k) line += fmt(r.nu[k]) + ",";
    line += row({fmt(r.l), fmt(r.lhs.value), fmt(r.lhs_error), fmt(r.kernel_cross.value), fmt(r.kernel_cross.error),
                 fmt(r.background.value), fmt(r.background.error), fmt(r.rhs), fmt(r.rhs_error), fmt(r.defect),
                 fmt(r.defect_error)});
    rows.push_back(line);
  }
  w.write_csv("slice-scan.csv", header, rows);
  json dirs = json::array();
  for (const auto& d : res.directions)
    dirs.push_back({{"nu", vec_json(d.nu, n)},
                    {"integrated_defect", num(d.integrated_defect)},
                    {"integrated_error", num(d.integrated_error)},
                    {"integrated_lhs", num(d.integrated_lhs)},
                    {"integrated_rhs", num(d.integrated_rhs)}});
  if (!res.records.empty()) {
    const auto& m = res.records[res.min_index];
    summary["min_defect"] = {{"nu", vec_json(m.nu, n)}, {"l", m.l}, {"defect", num(m.defect)},
                             {"defect_error", num(m.defect_error)}};
    summary["cut_beats_shape"] = m.defect < -3.0 * m.defect_error;
  }
  summary["directions"] = dirs;
  if (c.flag("mass_bound")) {
    const auto mb = averaged_mass_bound(shape, params, spec, grid);
    summary["mass_bound"] = {{"mass", num(mb.mass)},
                             {"sphere_constant", num(mb.sphere_constant)},
                             {"sphere_constant_uncorrected", num(mb.sphere_constant_uncorrected)},
                             {"averaged_lhs", to_json(mb.averaged_lhs)},
                             {"averaged_kernel", to_json(mb.averaged_kernel)},
                             {"averaged_background", to_json(mb.averaged_background)},
                             {"averaged_defect", num(mb.averaged_defect)},
                             {"averaged_defect_error", num(mb.averaged_defect_error)},
                             {"mass_term", num(mb.mass_term)},
                             {"mass_term_expected", num(mb.mass_term_expected)},
                             {"kernel_term", num(mb.kernel_term)},
                             {"background_factor", num(mb.background_factor)},
                             {"C1_m", num(mb.c1_m)},
                             {"C2_plus_A", num(mb.c2_plus_a)},
                             {"vacuous", mb.vacuous},
                             {"warnings", mb.warnings}};
    summary["nonexistence_signature"] = mb.nonexistence_signature;
  }
  return ok;
}

FamilyGrid family_grid(const ExperimentConfig& c) {
  FamilyGrid g;
  g.fractions = c.numbers("family.fractions");
  g.d_points = static_cast<int>(c.integer("family.d_points"));
  g.d_max_factor = c.number("family.d_max_factor");
  g.include_far = c.flag("family.include_far");
  g.max_balls = static_cast<int>(c.integer("family.max_balls"));
  return g;
}

std::vector<std::string> trace_rows(const FamilySearchResult& r, const std::string& label) {
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& t = r.trace[i];
    rows.push_back(row({label, std::to_string(i), t.member.kind, std::to_string(t.member.balls), fmt(t.member.m1),
                        fmt(t.member.m2), fmt(t.member.d), fmt(t.energy), fmt(t.error), fmt(t.best_energy)}));
  }
  return rows;
}

int run_family(const ExperimentConfig& c, Writer& w, json& summary) {
  const auto params = energy_params(c);
  const std::string mode = c.get("family.mode");
  const std::string header = "search,index,kind,balls,m1,m2,d,energy,error,best_energy";
  summary["mode"] = mode;
  if (mode == "split") {
    const auto r = split_advantage(c.number("family.mass"), params, family_grid(c), quadrature_spec(c));
    w.write_csv("family.csv", header, trace_rows(r, "split"));
    summary["result"] = to_json(r);
    return ok;
  }
  if (mode == "probe") {
    const auto r = weak_subadditivity_probe(c.number("family.m1"), c.number("family.m2"), params, family_grid(c),
                                            quadrature_spec(c));
    auto rows = trace_rows(r.total, "total");
    for (auto&& x : trace_rows(r.part_a, "part_a")) rows.push_back(x);
    for (auto&& x : trace_rows(r.part_0, "part_0")) rows.push_back(x);
    w.write_csv("family.csv", header, rows);
    summary["total"] = to_json(r.total);
    summary["part_a"] = to_json(r.part_a);
    summary["part_0"] = to_json(r.part_0);
    summary["residual"] = num(r.residual);
    summary["error"] = num(r.error);
    return ok;
  }
  if (mode == "anneal") {
    const Shape shape = make_shape(c);
    if (!shape.plain_voxels())
      throw PreconditionError("anneal mode needs a voxel shape (a voxel file or shape.spacing > 0)");
    AnnealSchedule sched;
    const long long steps = c.integer("anneal.steps"), epoch = c.integer("anneal.epoch");
    if (steps < 0 || epoch <= 0) throw ConfigError("anneal.steps must be >= 0 and anneal.epoch > 0");
    sched.steps = static_cast<std::size_t>(steps);
    sched.epoch = static_cast<std::size_t>(epoch);
    sched.temperature = c.number("anneal.temperature");
    sched.ratio = c.number("anneal.ratio");
    const auto r = voxel_local_search(shape.voxels(), params, sched, static_cast<std::uint64_t>(c.integer("seed")));
    std::vector<std::string> rows;
    for (const auto& t : r.trace)
      rows.push_back(row({std::to_string(t.step), fmt(t.temperature), fmt(t.energy), fmt(t.best_energy),
                          std::to_string(t.accepted)}));
    w.write_csv("family.csv", "step,temperature,energy,best_energy,accepted", rows);
    save_shape(w.path("family-best.vox"), Shape(r.best));
    summary["initial_energy"] = num(r.initial_energy);
    summary["best_energy"] = num(r.best_energy);
    summary["accepted"] = r.accepted;
    summary["cells"] = r.best.count();
    summary["best_shape"] = "family-best.vox";
    summary["warnings"] = r.warnings;
    return ok;
  }
  throw ConfigError("family.mode must be split, probe or anneal");
}

int run_verify(const ExperimentConfig& c, Writer& w, json& summary) {
  const auto params = energy_params(c);
  const auto spec = quadrature_spec(c);
  const Kernel kernel(params.kernel);
  const int n = params.dimension();
  const std::uint64_t seed = static_cast<std::uint64_t>(c.integer("seed"));
  std::vector<std::string> rows;
  int passed = 0, failed = 0;
  auto check = [&](const std::string& suite, const std::string& id, double value, double reference, double residual,
                   double error, double tolerance, bool pass) {
    rows.push_back(row({suite, id, fmt(value), fmt(reference), fmt(residual), fmt(error), fmt(tolerance),
                        pass ? "pass" : "fail"}));
    (pass ? passed : failed)++;
  };

  // Union identities on disjoint voxel pairs: residual within 3 combined errors.
  const long long pairs = c.integer("verify.pairs");
  const int cells = static_cast<int>(c.integer("verify.grid"));
  for (long long i = 0; i < pairs; ++i) {
    const auto [u, v] = random_voxel_pair(n, cells, derive_seed(seed, 1000 + static_cast<std::uint64_t>(i)));
    const auto sp = spec.with_stream(2000 + static_cast<std::uint64_t>(i));
    const auto rp = check_perimeter_decomposition(Shape(u), Shape(v), kernel, sp);
    check("identity", "perimeter-" + std::to_string(i), rp.residual, 0.0, rp.residual, rp.error, 3.0 * rp.error,
          std::abs(rp.residual) <= 3.0 * rp.error);
    const auto rr = check_riesz_decomposition(Shape(u), Shape(v), sp, params.alpha);
    check("identity", "riesz-" + std::to_string(i), rr.residual, 0.0, rr.residual, rr.error, 3.0 * rr.error,
          std::abs(rr.residual) <= 3.0 * rr.error);
  }

  // Isoperimetric lower bound on random blobs under the volume cap.
  const double cap = isoperimetric_volume_cap(n, params.kernel.epsilon);
  for (long long i = 0; i < c.integer("verify.shapes"); ++i) {
    const auto blob = random_blob(n, derive_seed(seed, 3000 + static_cast<std::uint64_t>(i)), cap);
    const auto chk = isoperimetric_check(Shape(blob), params.kernel,
                                         spec.with_stream(4000 + static_cast<std::uint64_t>(i)),
                                         "blob-" + std::to_string(i));
    check("isoperimetry", chk.id, chk.perimeter.value, chk.bound, chk.slack, chk.error, -3.0 * chk.error,
          chk.slack >= -3.0 * chk.error);
  }

  // Scaling exponents of the configured shape.
  {
    const Shape shape = make_shape(c);
    if (!shape.trivially_empty()) {
      const auto sr = scaling_report(shape, c.number("verify.lambda"), params, spec);
      auto exponent = [&](const std::string& id, double got, double err, double expect, bool exact) {
        const double tol = std::max(0.02 * std::abs(expect), 3.0 * err);
        check("scaling", id, got, expect, got - expect, err, tol, !exact || std::abs(got - expect) <= tol);
      };
      exponent("perimeter", sr.perimeter_exponent, sr.perimeter_error, sr.perimeter_expected, sr.perimeter_exact);
      exponent("riesz", sr.riesz_exponent, sr.riesz_error, sr.riesz_expected, true);
      if (params.A > 0.0)
        exponent("background", sr.background_exponent, sr.background_error, sr.background_expected, true);
    }
  }

  // Sphere integral of (x . nu)_+ on a deterministic sphere grid.
  {
    QuadratureSpec grid_spec = spec;
    grid_spec.method = QuadratureMethod::tensor_midpoint;
    Rng rng(derive_seed(seed, 5000));
    for (int dim : {2, 3})
      for (long long i = 0; i < c.integer("verify.points"); ++i) {
        Vec x;
        for (int k = 0; k < dim; ++k) x[k] = rng.uniform(-2.0, 2.0);
        const auto chk = sphere_integral_check(x, dim, grid_spec);
        check("sphere-integral", "N" + std::to_string(dim) + "-" + std::to_string(i), chk.numeric.value,
              chk.closed_form, chk.relative_deviation, chk.numeric.error, 1e-3, chk.relative_deviation <= 1e-3);
      }
  }

  w.write_csv("verify.csv", "suite,id,value,reference,residual,error,tolerance,status", rows);
  summary["passed"] = passed;
  summary["failed"] = failed;
  return failed == 0 ? ok : checks_failed;
}

int run_kernel_check(const ExperimentConfig& c, Writer& w, json& summary) {
  const Kernel kernel(kernel_spec(c));
  AuditPlan plan;
  plan.directions = static_cast<int>(c.integer("audit.directions"));
  plan.pairs_per_annulus = static_cast<int>(c.integer("audit.pairs"));
  plan.tail_cutoff = c.number("audit.tail_cutoff");
  plan.seed = static_cast<unsigned long long>(c.integer("seed"));
  const auto rep = validate_conditions(kernel, plan);
  const int n = kernel.dimension();
  std::vector<std::string> rows;
  json conds = json::array();
  for (const auto& r : rep.conditions) {
    std::string witness;
    if (r.witness)
      for (int k = 0; k < n; ++k) witness += (k ? " " : "") + fmt((*r.witness)[k]);
    rows.push_back(row({r.name, to_string(r.verdict), fmt(r.margin), witness, "\"" + r.note + "\""}));
    json j = {{"name", r.name}, {"verdict", to_string(r.verdict)}, {"margin", num(r.margin)}, {"note", r.note}};
    if (r.witness) j["witness"] = vec_json(*r.witness, n);
    conds.push_back(j);
  }
  w.write_csv("kernel-check.csv", "condition,verdict,margin,witness,note", rows);
  summary["conditions"] = conds;
  summary["tail_partial"] = num(rep.tail_partial);
  summary["tail_remainder"] = num(rep.tail_remainder);
  return ok;
}

int report_error(const std::string& sub, const ExperimentConfig& c, const std::string& type, const std::string& msg,
                 int code, std::ostream& err) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["subcommand"] = sub;
  j["status"] = "error";
  j["exit_code"] = code;
  j["error"] = {{"type", type}, {"message", msg}};
  try {
    j["config_hash"] = c.hash();
    const fs::path dir = output_directory(c);
    fs::create_directories(dir);
    std::ofstream(dir / (sub + ".error.json"), std::ios::binary) << j.dump(2) << "\n";
  } catch (...) {
    // The record on stderr is the fallback when the output directory itself is unusable.
  }
  err << j.dump() << "\n";
  return code;
}

}  // namespace

int run(const std::string& sub, const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
      throw ConfigError("unknown subcommand '" + sub + "'");
    config.check_keys();
    Writer w(config, sub);
    json summary = w.envelope();
    int code = ok;
    if (sub == "energy") code = run_energy(config, w, summary);
    else if (sub == "critical-mass") code = run_critical_mass(config, w, summary, out);
    else if (sub == "slice-scan") code = run_slice_scan(config, w, summary);
    else if (sub == "family") code = run_family(config, w, summary);
    else if (sub == "verify") code = run_verify(config, w, summary);
    else code = run_kernel_check(config, w, summary);
    summary["status"] = code == ok ? "ok" : "checks-failed";
    w.write_json(sub + ".json", summary);
    if (sub != "critical-mass") out << summary.dump() << "\n";
    return code;
  } catch (const PathError& e) {
    return report_error(sub, config, "PathError", e.what(), config_error, err);
  } catch (const ConfigError& e) {
    return report_error(sub, config, "ConfigError", e.what(), config_error, err);
  } catch (const PreconditionError& e) {
    return report_error(sub, config, "PreconditionError", e.what(), precondition_failed, err);
  } catch (const ParameterError& e) {
    return report_error(sub, config, "ParameterError", e.what(), precondition_failed, err);
  } catch (const DomainError& e) {
    return report_error(sub, config, "DomainError", e.what(), precondition_failed, err);
  } catch (const NumericalError& e) {
    return report_error(sub, config, "NumericalError", e.what(), numerical_failure, err);
  } catch (const std::exception& e) {
    return report_error(sub, config, "InternalError", e.what(), internal, err);
  }
}

}  // namespace droplab::cli
