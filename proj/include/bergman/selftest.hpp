#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bergman {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Built-in oracle suite: basis Gram matrix, monomial entries, Kronecker
/// assembly, slice consistency and the phi = z pipelines.
std::vector<CheckResult> run_selftest(std::uint64_t seed);

}  // namespace bergman
