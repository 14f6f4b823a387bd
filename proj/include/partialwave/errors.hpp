#pragma once

#include <stdexcept>
#include <string>

namespace partialwave {

/// Base error; what() is prefixed with the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// An input violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (instability, no convergence, unresolvable structure).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace partialwave
