#pragma once

#include <stdexcept>
#include <string>

namespace radfed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or hyper-parameter.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Inputs that disagree with each other (shape, family, counts).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Marginals that cannot be met by any nonnegative matrix.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Non-finite values produced or consumed by a numeric routine.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A quantity that is mathematically undefined for the given input.
class UndefinedValueError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message carries the location.
class IngestionError : public Error {
public:
    using Error::Error;
};

/// Invalid experiment or CLI configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace radfed
