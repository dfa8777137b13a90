#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cascade {

// Invalid or mismatched arguments (bad digits, inconsistent moments, shape mismatch).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The moment recursion left the region where the next moment is finite.
class DivergenceError : public DomainError {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : DomainError(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// A request exceeding the configured node cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cascade
