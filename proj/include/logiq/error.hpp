#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logiq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0 && column == 0) return what;
        std::string s = "line " + std::to_string(line);
        if (column != 0) s += ", column " + std::to_string(column);
        return s + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A configured size guard (brute-force caps, state-space caps, arc caps) was hit.
class CapExceeded : public Error {
public:
    using Error::Error;
};

} // namespace logiq
