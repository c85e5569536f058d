#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdfsim {

// Base for everything this library throws.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Arguments outside an operation's domain (bad probabilities, empty inputs, ...).
class DomainError : public Error
{
public:
    using Error::Error;
};

// Inconsistent or incomplete experiment configuration.
class ConfigError : public Error
{
public:
    using Error::Error;
};

// Malformed text input. Line and column are 1-based; 0 means "not applicable".
class ParseError : public Error
{
public:
    ParseError(const std::string &what, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace sdfsim
