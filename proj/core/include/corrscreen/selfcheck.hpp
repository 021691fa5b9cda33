#pragma once

#include <string>
#include <vector>

namespace corrscreen {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // empty on success unless informative
};

// Built-in invariant suite behind the `validate` subcommand: generator
// known-answer vectors, solver residuals, closed-form constructions against
// dense oracles, sampler factor equivalence, selection against a full sort,
// rank equivalence of the two screening statistics, and determinism of the
// harness. Runs in a few seconds.
std::vector<CheckResult> run_selfchecks();

}  // namespace corrscreen
