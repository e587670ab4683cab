#pragma once

#include <stdexcept>
#include <string>

namespace coincast {

/// Error raised by all coincast modules for invalid data, files or arguments.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad command-line input (mapped to exit code 2 by the CLI, where data and
/// model errors map to 1).
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace coincast
