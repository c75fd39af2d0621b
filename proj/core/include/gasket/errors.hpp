#pragma once

#include <stdexcept>
#include <string>

namespace gasket {

// Bad arguments, malformed files, inconsistent levels. CLI maps this to exit 1.
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested level exceeds the configured cap.
class capacity_error : public validation_error {
public:
  explicit capacity_error(const std::string& msg) : validation_error(msg) {}
};

// Solver breakdown, divergent series, non-convergence. CLI maps this to exit 2.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gasket
