#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oncograph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor or matrix shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid hyperparameters or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A computation produced NaN or infinity.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Input data violates a domain rule (unknown class, bad label, hash mismatch).
class DataError : public Error {
public:
    using Error::Error;
};

/// API misuse: calling an operation outside its preconditions.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace oncograph
