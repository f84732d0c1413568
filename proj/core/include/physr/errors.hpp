#pragma once

#include <stdexcept>
#include <string>

namespace physr {

// Base of every error the library throws. Callers that only need a message
// can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A referenced file is missing, unreadable or unwritable.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Blob or manifest shapes disagree with each other.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Values violate a documented invariant (orthonormality, positivity, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Input is valid but geometrically degenerate (collinear centers, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Run configuration is incomplete or contradictory.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An embedding provider failed on a span of requests [begin, end).
class ProviderError : public Error {
 public:
  ProviderError(std::size_t begin, std::size_t end, const std::string& what)
      : Error("provider failed on requests [" + std::to_string(begin) + ", " +
              std::to_string(end) + "): " + what),
        begin_(begin),
        end_(end) {}
  std::size_t begin() const noexcept { return begin_; }
  std::size_t end() const noexcept { return end_; }

 private:
  std::size_t begin_;
  std::size_t end_;
};

// Wraps any failure raised inside a pipeline stage with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace physr
