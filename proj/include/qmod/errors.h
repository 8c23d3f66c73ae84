#pragma once

#include <stdexcept>
#include <string>

namespace qmod {

// Bad user input: scenario files, CLI arguments, out-of-domain parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke a state-machine contract (consume without reserve, degrade a committed txn, ...).
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A run-level invariant (conservation, mutual exclusion, rollback atomicity) failed.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmod
