#pragma once

#include <stdexcept>
#include <string>

namespace qscope {

/// Base class for every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, schema violations, unparsable dates or CSV.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A remote backend could not be reached, or kept failing past its retry budget.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

/// A backend answered, but the answer was unusable (non-200, bad shape).
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace qscope
