#pragma once

#include <stdexcept>
#include <string>

namespace pdsplit {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Block layouts of two operands do not match.
class LayoutError : public Error {
 public:
  explicit LayoutError(const std::string& what) : Error(what) {}
};

// Non-finite value produced where a finite one is required.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

// Invalid argument to a library operation.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// A step-length certificate was required to pass and did not.
class CertificateError : public Error {
 public:
  explicit CertificateError(const std::string& what) : Error(what) {}
};

// Run-configuration parse or validation failure; the message carries
// file name and line number where applicable.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace pdsplit
