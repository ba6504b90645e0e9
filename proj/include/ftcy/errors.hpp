#pragma once

#include <stdexcept>
#include <string>

namespace ftcy {

// Violated numerical contract: positivity failure, cone exit, residual too
// large, non-convergence.  CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed arguments or out-of-range parameters.  CLI exit code 3.
class usage_error : public std::invalid_argument {
 public:
  explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// File format or filesystem trouble.  CLI exit code 4.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ftcy
