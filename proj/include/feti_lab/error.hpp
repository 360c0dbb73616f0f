#pragma once

#include <stdexcept>
#include <string>

namespace feti_lab {

/// Bad arguments such as invalid mesh sizes or mismatched dimensions.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization failed where the operator must be SPD. Signals a corrupted assembly.
class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative method hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double achieved, int iterations)
      : std::runtime_error(what + " (achieved " + std::to_string(achieved) + " after " +
                           std::to_string(iterations) + " iterations)"),
        achieved_(achieved),
        iterations_(iterations) {}

  double achieved() const noexcept { return achieved_; }
  int iterations() const noexcept { return iterations_; }

private:
  double achieved_;
  int iterations_;
};

}  // namespace feti_lab
