#include "sdfsim/error.hpp"

namespace sdfsim {

namespace {

std::string with_position(const std::string &what, std::size_t line, std::size_t column)
{
    if (line == 0)
        return what;
    std::string out = "line " + std::to_string(line);
    if (column != 0)
        out += ", column " + std::to_string(column);
    return out + ": " + what;
}

} // namespace

ParseError::ParseError(const std::string &what, std::size_t line, std::size_t column)
    : Error(with_position(what, line, column)), line_(line), column_(column)
{
}

} // namespace sdfsim
