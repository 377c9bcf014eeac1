#pragma once

#include <stdexcept>
#include <string>

namespace buildseg {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Missing file or an OS-level read/write failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input decodes but uses a feature outside the supported profile
/// (bit depth, color type, channel count).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid input: corrupt PNG stream, malformed grid header,
/// non-numeric token, bad JSON.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Shape disagreement between grids, or a rectangle outside its source.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or argument value.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace buildseg
