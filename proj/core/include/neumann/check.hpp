#pragma once

#include <string>

namespace neumann {

/// Outcome of one named assertion in a verification report.
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

}  // namespace neumann
