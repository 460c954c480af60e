#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergolab/maps.hpp"
#include "ergolab/potentials.hpp"

namespace ergolab::cli {

/// Bad config text, unknown keys, type mismatches. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Validated experiment description. Values are stored in canonical text form
/// so the config round-trips through serialize() and parse_config() unchanged.
class ExperimentConfig {
 public:
  /// Sets section.key after checking that the key exists and the value parses.
  void set(const std::string& section, const std::string& key, const std::string& value);
  /// "section.key=value".
  void set_assignment(const std::string& assignment);
  bool has(const std::string& section, const std::string& key) const;
  void erase(const std::string& section, const std::string& key);

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback = "") const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                const std::vector<int>& fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const;

  std::string operation() const { return get_string("run", "operation"); }
  std::uint64_t seed() const { return get_u64("run", "seed", 0); }
  std::string output_dir() const { return get_string("output", "dir", "ergolab_out"); }
  bool reproducible() const { return get_bool("output", "reproducible", false); }

  bool has_map() const { return has("map", "kind"); }
  /// Throws ConfigError for a missing section or key.
  MapSystem map() const;
  /// Zero potential when there is no [potential] section.
  Potential potential(const MapSystem& map) const;

  /// Checks cross-key requirements (map kind parameters, potential kind
  /// parameters) by building the objects. Module contract errors surface as
  /// ConfigError.
  void validate() const;

  /// Canonical text: sections in fixed order, keys sorted.
  std::string serialize() const;
  /// FNV-1a over the canonical text without the [output] section.
  std::string hash() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

/// Parses `[section]` / `key = value` text. With validate = false the
/// cross-key checks are left to the caller (the CLI applies flag overrides
/// first).
ExperimentConfig parse_config(const std::string& text, bool validate = true);

/// Subcommands accepted by run().
const std::vector<std::string>& operations();

}  // namespace ergolab::cli
