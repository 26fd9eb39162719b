#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace droplab::cli {

inline constexpr int kSchemaVersion = 1;
/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "DROPLAB_OUTPUT_DIR";

enum ExitCode { ok = 0, checks_failed = 1, config_error = 2, precondition_failed = 3, numerical_failure = 4, internal = 5 };

struct KeyDoc {
  const char* name;
  const char* fallback;
  const char* doc;
};

/// Every accepted configuration key with its default.
const std::vector<KeyDoc>& documented_keys();

const std::vector<std::string>& subcommands();

/// Flat key = value configuration; '#' starts a comment.
class ExperimentConfig {
public:
  ExperimentConfig() = default;

  static ExperimentConfig parse(const std::string& text, const std::string& source = "<string>");
  static ExperimentConfig load(const std::string& path);

  /// Override or add a key (command-line --set).
  void set(const std::string& key, const std::string& value);
  /// ConfigError listing every key that is not documented.
  void check_keys() const;

  /// Value of a documented key, falling back to its default.
  std::string get(const std::string& key) const;
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  /// All documented keys with resolved values, sorted, one "key = value" per line.
  std::string resolved() const;
  /// SHA-256 of the resolved configuration without the output directory.
  std::string hash() const;

private:
  std::map<std::string, std::string> values_;
};

/// Output directory: the `out` key, else the environment variable, else "droplab-out".
std::string output_directory(const ExperimentConfig& config);

/// Run one subcommand; results go to the output directory, a JSON summary to `out`,
/// diagnostics and machine-readable error records to `err`.
int run(const std::string& subcommand, const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace droplab::cli
