#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdnn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector lengths or matrix shapes that do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A tuning parameter (k, r, train size, ...) outside its feasible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Some class has fewer rows than an operation needs (e.g. n_j < 2 for pairwise means).
class InsufficientClassSizeError : public Error {
public:
    using Error::Error;
};

/// Non-finite coordinates, out-of-range labels, empty classes.
class InvalidDataError : public Error {
public:
    using Error::Error;
};

class StratificationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace hdnn
