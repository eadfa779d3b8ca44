#pragma once

#include <stdexcept>
#include <string>

namespace hjcert {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration (bad corners, unknown keys, bad parameters).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string pointer = {})
      : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}
  /// JSON pointer of the offending scenario entry, empty when not applicable.
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite Hamiltonian values or similar evaluation failures.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Thrown when a structure fails an invariant checked at construction.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Requested operation needs a capability the input does not provide
/// (missing p-gradient, strategy-dependent gradients, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class SpliceError : public Error {
 public:
  SpliceError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_update)
      : Error(what), last_update_(last_update) {}
  double last_update() const noexcept { return last_update_; }

 private:
  double last_update_;
};

/// Differential-inclusion path whose Young-equality residual is too large.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class SchemeError : public Error {
 public:
  using Error::Error;
};

}  // namespace hjcert
