#pragma once

#include <stdexcept>
#include <string>

namespace erl {

// Base of every error thrown by the library. The C API maps each subclass to
// a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or layout mismatch in arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// Operation called while the object is in the wrong state.
class StateError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf encountered where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Environment protocol violation (e.g. step after done).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Configuration parse/validation failure. key() names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config error [" + key + "]: " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Filesystem / run-directory failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace erl
