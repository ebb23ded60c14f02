#pragma once

#include <stdexcept>
#include <string>

namespace lqml {

/// Bad user input or violated precondition. CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Singular blocks, failed convergence checks and similar. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a per-site clover block cannot be factorized.
class SingularBlockError : public NumericalError {
 public:
  SingularBlockError(std::size_t site, int block, double condition)
      : NumericalError("singular diagonal block at site " + std::to_string(site) +
                       " (block " + std::to_string(block) + ", condition estimate " +
                       std::to_string(condition) + ")"),
        site_(site),
        block_(block) {}
  std::size_t site() const noexcept { return site_; }
  int block() const noexcept { return block_; }

 private:
  std::size_t site_;
  int block_;
};

/// Halo exchange failures (missing message, duplicate post).
class CommError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An API was called out of order (e.g. consuming a halo before receiving it).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lqml
