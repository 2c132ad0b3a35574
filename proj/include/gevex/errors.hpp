#pragma once

#include <stdexcept>
#include <string>

namespace gevex {

// Error taxonomy. The CLI maps these onto exit codes:
//   ConfigError -> 2, DataError (and subclasses) -> 3, NumericError/ShapeError -> 4.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or missing configuration (unknown keys, invalid values, missing artifacts
// the user is expected to point at).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Problems with input data files.
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Malformed line in an input file; message names file and line.
struct ParseError : DataError {
    explicit ParseError(const std::string& msg) : DataError(msg) {}
};

// A record references an entity that does not exist.
struct ReferentialError : DataError {
    explicit ReferentialError(const std::string& msg) : DataError(msg) {}
};

// Row/column counts disagree with the declared schema.
struct DimensionError : DataError {
    explicit DimensionError(const std::string& msg) : DataError(msg) {}
};

// Tensor shape mismatch when composing operations.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Non-finite values, divergence, or otherwise numerically invalid states.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

} // namespace gevex
