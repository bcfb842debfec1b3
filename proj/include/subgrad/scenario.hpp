#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "subgrad/json_io.hpp"
#include "subgrad/polyhedron.hpp"
#include "subgrad/rational.hpp"

namespace subgrad {

/// Exit statuses shared by the scenario runner and the command line.
enum ExitCode : int { kExitHolds = 0, kExitFails = 1, kExitInconclusive = 2, kExitInputError = 3 };

/// Command-line values that take precedence over the scenario file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<Rational> eps;
  std::optional<Rational> eta;
  std::optional<NormSpec> norm;
  std::optional<RationalVector> point;
};

struct ScenarioResult {
  int exit_code = kExitInputError;
  std::string kind;
  std::string claim;    // claim id, probe name, or the kind itself
  std::string verdict;  // short label for tables
  Json report;          // deterministic: no timings, no absolute paths added by the runner
  std::string text;     // human-readable report
};

/// Scenario object:
///   {"kind": "check" | "certify" | "stardiff" | "subdiff" | "probe", ...}
/// File-valued inputs ("dc", "f", "g", "function", "problem", "A", "B") are
/// either inline JSON objects or paths relative to `base_dir`.
/// Unknown keys and malformed values raise ParseError before any work starts.
ScenarioResult run_scenario(const Json& scenario, const std::filesystem::path& base_dir, const Overrides& overrides);

/// Loads and runs a scenario file. Library errors become exit 3 with the
/// error in the report instead of propagating.
ScenarioResult run_scenario_file(const std::filesystem::path& path, const Overrides& overrides);

/// Same error mapping for an in-memory scenario.
ScenarioResult run_scenario_guarded(const Json& scenario, const std::filesystem::path& base_dir,
                                    const Overrides& overrides);

struct CorpusRow {
  std::string name;  // file name
  ScenarioResult result;
  double wall_seconds = 0;
  bool passed() const { return result.exit_code == kExitHolds; }
};

struct CorpusResult {
  int exit_code = kExitInputError;
  std::vector<CorpusRow> rows;  // lexicographic by name
  Json report;                  // byte-stable for fixed inputs and seed, whatever `jobs` is
  std::string text;             // table with wall times
};

/// Runs every *.json file of `dir` whose name matches the glob `filter`.
/// Exit 0 iff every row exits 0; otherwise 3 if any row had an input error,
/// else 1 if any row failed, else 2. An empty selection exits 3.
CorpusResult corpus_run(const std::filesystem::path& dir, const std::string& filter, unsigned jobs,
                        const Overrides& overrides);

/// Human-readable form of a set: intervals in 1D, generators otherwise.
std::string describe_set(const Polyhedron& p);

}  // namespace subgrad
