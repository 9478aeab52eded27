#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ohmnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number (0 when the
/// problem is not tied to a single line).
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Training diverged (NaN/Inf in a table or in the objective).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace ohmnet
