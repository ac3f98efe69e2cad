// error.hpp - exception types shared across the library and the CLI.

#pragma once

#include <stdexcept>
#include <string>

namespace bdrelay {

// Bad user input: malformed config file, out-of-range parameter.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Degenerate chain, solver residual above tolerance, underflowing recursion.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested a closed form outside the regime in which it is stated.
class OutOfScopeError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace bdrelay
