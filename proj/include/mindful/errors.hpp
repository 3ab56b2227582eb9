#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mindful {

// Raised when a documented precondition of an operation is not met.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input files (PNG, CSV, segment maps, JSON).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ClassifierError : public std::runtime_error {
 public:
  ClassifierError(const std::string& what, std::string request_id = {},
                  bool retryable = false)
      : std::runtime_error(what),
        request_id_(std::move(request_id)),
        retryable_(retryable) {}

  const std::string& request_id() const noexcept { return request_id_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  std::string request_id_;
  bool retryable_;
};

// Non-fatal conditions (empty masks, fallback thresholds, ...) are reported
// through an optional sink instead of a global logger.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace mindful
