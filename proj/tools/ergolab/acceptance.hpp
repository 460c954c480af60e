#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "runner.hpp"

namespace ergolab::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20261017;
  /// Reruns criteria 1-10 into <dir>/rerun and byte-compares the CSVs.
  bool check_determinism = true;
  std::function<void(const CriterionResult&)> on_result;
};

/// Runs the acceptance checks, writing one CSV per criterion plus
/// acceptance.csv into `out`.
std::vector<CriterionResult> run_acceptance(OutputSet& out, const AcceptanceOptions& options);

std::string format_result(const CriterionResult& r);

}  // namespace ergolab::cli
