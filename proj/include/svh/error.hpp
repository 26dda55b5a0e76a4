#pragma once

#include <stdexcept>
#include <string>

namespace svh {

// Library-wide error taxonomy. Every throwing operation documents which of
// these it can raise; callers that need to distinguish catch the subtype.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value left its declared box / domain. Message names the offending index.
class BoundsError : public Error {
public:
    using Error::Error;
};

// Text input could not be parsed. Carries the 1-based line number when known.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_ = 0;
};

// A named entity (builtin id, registry key) does not exist.
class LookupError : public Error {
public:
    using Error::Error;
};

// Numerical routine failed beyond recovery (factorization, non-finite data).
class NumericalError : public Error {
public:
    using Error::Error;
};

// Caller violated an argument contract.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Operation invoked on an object in the wrong state (e.g. missing checkpoint).
class StateError : public Error {
public:
    using Error::Error;
};

// Requested metric/feature is not available for this problem configuration.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

} // namespace svh
