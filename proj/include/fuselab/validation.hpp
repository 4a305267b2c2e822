#pragma once

#include <string>
#include <vector>

namespace fuselab {

/// One failed check: which invariant, on which labels, and a
/// human-readable account of what was expected vs. observed.
struct Violation {
  std::string check;
  std::vector<std::string> witnesses;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t checks_run = 0;
  bool truncated = false;  // stopped early after hitting max_violations

  bool ok() const { return violations.empty(); }
};

}  // namespace fuselab
