#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace ergolab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct OutputFile {
  std::string name;
  std::string checksum;  // fnv1a hex
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string operation;
  double wall_clock_seconds = 0.0;
  std::vector<OutputFile> files;
  /// Lines printed on stdout (values, PASS/FAIL).
  std::vector<std::string> summary;
  /// False when a verification operation ran but did not pass.
  bool passed = true;
};

/// Writes into one directory and remembers what it wrote so a failed run can
/// remove its partial outputs.
class OutputSet {
 public:
  OutputSet(std::string dir, std::string config_hash, bool reproducible);

  /// CSV payload; a "# config_hash=..." line is put in front of the header.
  void csv(const std::string& name, const std::string& body);
  void svg(const std::string& name, const std::string& body);
  void text(const std::string& name, const std::string& body);
  /// Timestamp comment for SVGs, nothing under --reproducible.
  std::optional<std::string> stamp() const;

  const std::vector<OutputFile>& files() const { return files_; }
  const std::string& dir() const { return dir_; }
  const std::string& config_hash() const { return hash_; }
  bool reproducible() const { return reproducible_; }
  void remove_all();

 private:
  void write(const std::string& name, const std::string& body);

  std::string dir_;
  std::string hash_;
  bool reproducible_;
  std::vector<OutputFile> files_;
};

/// Dispatches to the configured operation, writes outputs and manifest.txt.
/// On an exception every file written so far is removed before rethrowing.
RunManifest run(const ExperimentConfig& config, std::ostream& log);

std::string manifest_text(const RunManifest& manifest);

}  // namespace ergolab::cli
