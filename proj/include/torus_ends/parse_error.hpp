#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace torus_ends {

// Malformed literal; position is a 0-based character offset into the input.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, const std::string& what)
        : std::runtime_error("at position " + std::to_string(position) + ": " + what), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

}  // namespace torus_ends
