#pragma once

#include <stdexcept>
#include <string>

namespace gencon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible algebra tags, dimensions or degrees.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gencon
