#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mcqforge {

/// Base class of every error raised by libmcqforge.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be decoded. `offset` is the first bad byte.
class IngestError : public Error {
public:
  IngestError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// A resource or data file was unreadable or malformed.
class LoadError : public Error {
public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class ContractViolation : public Error {
public:
  using Error::Error;
};

/// Errors reported to annotation clients carry a stable machine-readable name.
class NamedError : public Error {
public:
  NamedError(std::string constraint, const std::string& message)
      : Error(message), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

private:
  std::string constraint_;
};

/// A submission violated a server-side constraint.
class ValidationError : public NamedError {
public:
  using NamedError::NamedError;
};

/// The assignment is unknown, already submitted, or expired.
class ConflictError : public NamedError {
public:
  using NamedError::NamedError;
};

/// The queue has nothing to hand out.
class NoWork : public NamedError {
public:
  explicit NoWork(const std::string& message) : NamedError("no_work", message) {}
};

/// The service is missing a component it needs (e.g. no ranking model).
class ConfigError : public NamedError {
public:
  using NamedError::NamedError;
};

}  // namespace mcqforge
