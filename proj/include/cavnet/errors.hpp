#pragma once

#include <stdexcept>

namespace cavnet {

// Base class for all failures raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid arguments, domain violations, or malformed configuration.
class ValidationError : public Error {
public:
    using Error::Error;
};

// An acceptance rule that matches no outcome with positive probability.
class EmptyAcceptanceError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cavnet
