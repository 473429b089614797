#pragma once

#include <stdexcept>
#include <string>

namespace freespiral {

// Input outside an operation's stated domain.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during integration or root finding (NaN, overflow,
// velocity ceiling, non-monotone phase).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario file problems: syntax, unknown keys, invalid values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace freespiral
