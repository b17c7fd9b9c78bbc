#pragma once

#include <functional>
#include <string>
#include <vector>

namespace udsp {

struct CriterionResult {
  std::string id;
  std::string description;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  std::string id;
  std::string description;
  std::function<CriterionResult()> run;
};

[[nodiscard]] auto acceptance_criteria() -> std::vector<Criterion>;

// Runs every criterion whose id is in `only` (all when empty). Exceptions
// thrown by a criterion are reported as a failure of that criterion.
[[nodiscard]] auto run_acceptance(const std::vector<std::string> &only = {})
    -> std::vector<CriterionResult>;

// One "PASS|FAIL id description :: detail (t s)" line per result.
[[nodiscard]] auto format_results(const std::vector<CriterionResult> &results) -> std::string;

} // namespace udsp
