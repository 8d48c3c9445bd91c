#pragma once

#include <stdexcept>
#include <string>

namespace opennet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A network or relation violates one of its structural invariants.
class InvalidNetwork : public Error {
 public:
  using Error::Error;
};

// An operation was called on arguments outside its domain: kind mismatch,
// port-count mismatch, population mismatch, missing boundary data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace opennet
