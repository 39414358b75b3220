#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpmc {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input. Line and column are 1-based; line is 0 for
/// single-line inputs such as property strings.
class ParseError : public Error {
public:
    ParseError(std::string const& message, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    std::string const& detail() const { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

/// A model or diagram that violates a structural requirement.
class ModelError : public Error {
public:
    using Error::Error;
};

/// An iterative procedure did not reach its stopping criterion.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace fpmc
