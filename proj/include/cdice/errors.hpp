#pragma once

#include <stdexcept>
#include <string>

namespace cdice {

// Bad parameters, malformed input files, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// The trajectory optimizer hit its iteration cap or stalled.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cdice
