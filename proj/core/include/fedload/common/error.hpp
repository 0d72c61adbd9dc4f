#pragma once

#include <stdexcept>
#include <string>

namespace fedload {

// Violated precondition of a library call: bad shapes, empty inputs,
// non-finite values where finite ones are required.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Problems with external data (malformed CSV, truncated blobs, short series).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace fedload
