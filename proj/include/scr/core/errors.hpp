#pragma once

#include <stdexcept>
#include <string>

namespace scr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor or vector dimensions disagree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Value outside the mathematical domain of an operation (negative probability, NaN input).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or hyper-parameter.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace scr
