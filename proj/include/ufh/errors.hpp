#pragma once

#include <stdexcept>
#include <string>

namespace ufh {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Point budget or exhaustive-search size exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Malformed or unsupported space description.
class PresentationError : public Error {
public:
    using Error::Error;
};

// A result would depend on where the window was truncated.
class PrecisionError : public Error {
public:
    using Error::Error;
};

class ContractViolation : public Error {
public:
    using Error::Error;
};

// A map is undefined on part of the data it was applied to.
class DomainError : public Error {
public:
    using Error::Error;
};

class WindowError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column)
    {
    }

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace ufh
