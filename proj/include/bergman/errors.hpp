#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bergman {

/// An iterative reduction failed to converge.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

/// A diagnostic declined to answer because the question is ill-posed.
class RefusedDiagnostic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllConditionedWinding : public RefusedDiagnostic {
 public:
  using RefusedDiagnostic::RefusedDiagnostic;
};

class ProbeTooClose : public RefusedDiagnostic {
 public:
  using RefusedDiagnostic::RefusedDiagnostic;
};

}  // namespace bergman
