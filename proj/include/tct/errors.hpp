#pragma once

#include <stdexcept>
#include <string>

namespace tct {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, out-of-range parameters, broken invariants.
/// The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

/// A configurable work cap was exceeded (path enumeration, exhaustive sweep).
struct CapExceededError : Error {
  using Error::Error;
};

}  // namespace tct
