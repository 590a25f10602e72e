#pragma once

#include <stdexcept>
#include <string>

namespace esncert {

// Contract violations (bad arguments, mismatched dimensions) are reported as
// std::invalid_argument. Failures that arise from the numerics themselves
// (singular plant state, no pH root, aborted campaign) use NumericalError.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace esncert
