#pragma once

#include <stdexcept>
#include <string>

namespace aic {

// Bad user input: malformed config, unknown generator id, inconsistent dims.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative method did not converge, rank deficiency, checked-arithmetic overflow.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what, long iterations = -1)
        : std::runtime_error(what), iterations(iterations) {}
    long iterations;
};

// Corrupt or out-of-contract serialized data.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aic
