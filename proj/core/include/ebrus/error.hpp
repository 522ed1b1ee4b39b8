#pragma once

#include <stdexcept>
#include <string>

namespace ebrus {

/// Exception carrying the name of the module that raised it, so that
/// orchestration code can report "module: message" without string parsing.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Raised when a trajectory produces non-finite values.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time, double max_abs)
      : Error("integrate", what), time_(time), max_abs_(max_abs) {}

  double time() const noexcept { return time_; }
  double max_abs() const noexcept { return max_abs_; }

 private:
  double time_;
  double max_abs_;
};

}  // namespace ebrus
