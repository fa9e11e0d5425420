#pragma once

#include <stdexcept>
#include <string>

namespace adf {

/// Broad failure category. The CLI maps these onto its exit codes.
enum class ErrorKind {
  Config,     // bad flag, option or parameter value
  Data,       // I/O, parsing, schema or quota problems with input data
  Invariant,  // internal state violated a documented invariant
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ErrorKind::Invariant, what) {}
};

/// Argument outside an operation's domain (empty class set, zero counts, ...).
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::Data, what) {}
};

}  // namespace adf
