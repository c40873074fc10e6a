#pragma once

#include <stdexcept>
#include <string>

namespace bos {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable, unwritable or malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside their documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must agree in shape do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace bos
