// errors.hpp — exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace aqs {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configured resource guard was hit (ball radius, dense matrix size, search nodes).
struct LimitExceeded : Error {
    using Error::Error;
};

// Bad user-facing input: malformed config, mismatched graphs, unsupported generator.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace aqs
