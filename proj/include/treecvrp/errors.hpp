#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treecvrp {

// Malformed or inconsistent input (bad tree, bad JSON, bad parameters).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Instance with no terminals where at least one is required.
struct EmptyInstanceError : ValidationError {
  explicit EmptyInstanceError(const std::string& what) : ValidationError(what) {}
};

// A configured compute budget would be exceeded; the message names the knob.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Exact integer arithmetic left the representable range.
struct OverflowError : std::runtime_error {
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Reads an integer budget override from the environment, falling back to a
// built-in default.  Used by the exact solvers and the expansion step.
std::int64_t env_budget(const char* name, std::int64_t fallback);

}  // namespace treecvrp
