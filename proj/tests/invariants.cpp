#include "invariant_suite.hpp"

int main() {
  check::Report report("invariants: ");
  check::run_invariants(report);
  return report.ok() ? 0 : 1;
}
