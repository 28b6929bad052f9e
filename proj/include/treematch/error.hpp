#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace treematch {

// All recoverable failures carry a machine-readable kind ("OddCardinality",
// "TriangleViolation", ...) plus a human-readable detail string.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(std::string kind, const std::string& detail) {
  throw Error(std::move(kind), detail);
}

}  // namespace treematch
