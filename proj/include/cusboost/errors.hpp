#pragma once

#include <stdexcept>
#include <string>

namespace cusboost {

// Malformed input files. Messages carry a 1-based line number where known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")") {}
};

// Structurally valid input that violates a semantic requirement
// (unknown label, index out of range, size mismatch, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameter combinations supplied by the caller.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training could not produce a usable model.
class TrainError : public std::runtime_error {
public:
    explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cusboost
