#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nvb {

/// Malformed or non-conforming mesh text. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t line, const std::string & what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// An iterative or direct solver failed. `estimate()` carries the condition estimate or the
/// last iterate's value, depending on the raising operation.
class NumericError : public std::runtime_error
{
public:
    NumericError(const std::string & what, double estimate) : std::runtime_error(what), estimate_(estimate) {}

    double estimate() const { return estimate_; }

private:
    double estimate_;
};

/// Input outside the supported class, e.g. overlay of red-refined meshes.
class UnsupportedError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

} // namespace nvb
