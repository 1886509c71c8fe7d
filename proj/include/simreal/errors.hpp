#pragma once

#include <stdexcept>
#include <string>

namespace simreal {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// ConfigError -> 2, ParseError -> 3, MismatchError -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible matrix/vector shapes.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Bad configuration value or missing required setting.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Unreadable or malformed input file.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Structurally valid input with inadmissible content (bad label, bad weight).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Model checkpoint does not match the data it is applied to.
class MismatchError : public Error {
public:
    explicit MismatchError(const std::string& msg) : Error(msg) {}
};

}  // namespace simreal
