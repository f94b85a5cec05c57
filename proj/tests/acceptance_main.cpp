// One PASS/FAIL line per acceptance criterion; exit status 1 if any failed.
// Arguments restrict the run to the given criterion ids.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "spinbath/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failed = 0;
  const auto results = spinbath::run_acceptance(only, [&](const spinbath::CriterionResult& r) {
    std::cout << spinbath::format_criterion(r) << std::endl;
    failed += !r.passed;
  });
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
