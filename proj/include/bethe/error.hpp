#pragma once

#include <stdexcept>
#include <string>

namespace bethe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: structural violations, bad parameters, unparsable files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The requested computation exceeds a configured enumeration cap.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace bethe
