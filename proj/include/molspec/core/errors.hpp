#pragma once

#include <stdexcept>
#include <string>

namespace molspec {

/// Base of all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition or malformed user input. The CLI maps it to exit code 2.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Configuration file problem; `field` is the dotted path of the offending key.
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string field, const std::string& message)
        : InvalidArgument(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed data file; `line` is 1-based, 0 if not attributable to a line.
class DataError : public InvalidArgument {
public:
    DataError(std::size_t line, const std::string& message)
        : InvalidArgument(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A numerical method failed its own accuracy or well-posedness checks. Exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace molspec
