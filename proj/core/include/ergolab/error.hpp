#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ergolab {

/// Caller passed arguments that violate an operation's precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not be carried out on otherwise valid input.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An orbit left the invariant region of its map.
class DomainEscape : public ComputationError {
 public:
  DomainEscape(std::size_t step, const std::string& what)
      : ComputationError("orbit escaped the domain at step " + std::to_string(step) + ": " + what),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace ergolab
