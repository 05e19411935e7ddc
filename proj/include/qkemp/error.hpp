#pragma once

#include <stdexcept>
#include <string>

namespace qkemp {

// Invalid user-supplied parameters (range violations, malformed input).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical computation could not produce a trustworthy value.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qkemp
