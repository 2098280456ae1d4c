#include <iostream>

#include "qhf/verify.hpp"

// Runs every acceptance criterion at the tolerances pinned in qhf::verify and
// prints one pass/fail line per criterion.
int main() {
  const auto results = qhf::verify::run_scope("all");
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ": " << r.detail << std::endl;
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "acceptance: all criteria passed" : "acceptance: FAILURES above")
            << std::endl;
  return all_pass ? 0 : 1;
}
