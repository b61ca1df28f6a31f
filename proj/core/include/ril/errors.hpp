#pragma once

#include <stdexcept>
#include <string>

namespace ril {

// Raised when an exact computation would exceed its documented
// memory or enumeration budget. The CLI maps this to exit code 4.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for invalid configuration values. The CLI maps this to exit code 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ril
