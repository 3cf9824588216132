#pragma once

#include <stdexcept>
#include <string>

namespace antfis {

/// Base of every error raised by the library. Messages are prefixed with the
/// module that raised them, e.g. "dataset: row 12: ...".
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument (bad fraction, wrong arity, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a defined result.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace antfis
