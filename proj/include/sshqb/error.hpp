#pragma once

#include <stdexcept>
#include <string>

namespace sshqb {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// A numerical invariant (conservation, positivity, bounds) was broken.
struct InvariantViolation : Error {
  using Error::Error;
};

// No first peak of the charged energy inside the scan window.
struct WindowTooShort : Error {
  using Error::Error;
};

// A J interval hides more than one ground-sector change.
struct RefineNeeded : Error {
  using Error::Error;
};

}  // namespace sshqb
