#pragma once

#include <stdexcept>
#include <string>

namespace sigkan {

// Error taxonomy mapped to process exit codes by the CLI:
// validation -> 1, numeric -> 2, io -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration, shape mismatches, violated preconditions.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Non-finite values, diverging computations, failed numerical checks.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

// Missing files, malformed input data, unwritable outputs.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace sigkan
