#pragma once

#include <stdexcept>
#include <string>

namespace freeprod {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. `location` is a human-readable position such as
/// "byte 17" or "token 3"; it is empty when the position is unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string location = {})
        : Error(location.empty() ? what : what + " (at " + location + ")"),
          message_(what),
          location_(std::move(location)) {}

    /// The message without the location.
    const std::string& message() const noexcept { return message_; }
    const std::string& location() const noexcept { return location_; }

private:
    std::string message_;
    std::string location_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Ground-set or lattice size outside the supported range.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Operands live over different ground sets or have incompatible shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Möbius value requested for an incomparable pair.
class OrderError : public Error {
public:
    using Error::Error;
};

/// A computation needs a moment beyond the state's degree bound.
class TruncationError : public Error {
public:
    using Error::Error;
};

class FactorMismatchError : public Error {
public:
    using Error::Error;
};

/// Raised when an internally built Gram matrix is not Hermitian. This is a bug,
/// never a property of the input.
class NotHermitianError : public Error {
public:
    using Error::Error;
};

} // namespace freeprod
