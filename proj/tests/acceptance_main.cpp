// Runs the acceptance battery and prints one pass/fail line per criterion.

#include <cstdio>

#include "cpw/harness.hpp"

int main() {
  auto results = cpw::run_acceptance(1);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("%s  criterion %2d  %s -- %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : 1;
}
