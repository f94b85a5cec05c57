#pragma once

// Built-in acceptance suite: nine end-to-end checks of the ensemble values,
// theory curves, propagators, symmetry traces and scaling exponents.

#include <functional>
#include <string>
#include <vector>

namespace spinbath {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// "PASS 3 <name> (12.3 s): <detail>"
std::string format_criterion(const CriterionResult& result);

/// Runs the criteria in `only` (all nine when empty), calling `report` as
/// each one finishes.
std::vector<CriterionResult> run_acceptance(
    const std::vector<int>& only = {},
    const std::function<void(const CriterionResult&)>& report = {}, int workers = 0);

}  // namespace spinbath
