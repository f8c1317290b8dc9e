#pragma once

#include <stdexcept>
#include <string>

namespace sft {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument combination, e.g. |m| > n.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a singular point (zero argument, coincident source and receiver).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Requested node count has no bundled grid file.
class UnsupportedGridError : public Error {
 public:
  using Error::Error;
};

/// Harmonic order exceeds what a grid can resolve.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates an invariant. The message starts with the field path.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operation applied to the wrong virtual source model.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Listener or trajectory outside the region where a method is valid.
class RegionError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed (non-convergence, empty average, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sft
