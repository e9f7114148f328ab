#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace cedf {

// One verification criterion's outcome. `ran` is false when the criterion
// belongs to the full suite and the fast suite was requested.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool ran = false;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct AcceptanceOptions {
  bool full = false;          // fast: exact-oracle criteria; full adds Monte Carlo ones
  std::uint64_t seed = 20260814;
  int jobs = 1;
  std::string scratch_dir;    // determinism-criterion artifact dir; empty = system temp
};

// Runs the verification suite and returns one result per criterion, in
// criterion order. Criteria never throw for expected measurement failures
// (they report pass = false); configuration-level problems still throw.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// Deterministic CSV artifacts of the fast suite (used by the determinism
// criterion and by the CLI `verify` command): a fixed set of small tables
// whose bytes must be identical across reruns and across --jobs values.
void write_verify_artifacts(const std::string& dir, std::uint64_t seed, int jobs);

// Prints "criterion <id> [<name>]: PASS/FAIL/SKIPPED — <detail>" lines.
void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

// 0 when every criterion that ran passed, 1 otherwise.
int acceptance_exit_code(const std::vector<CriterionResult>& results);

}  // namespace cedf
