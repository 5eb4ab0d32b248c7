#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selftrain {

// Error taxonomy shared by the whole library. The C API maps each subclass
// onto a status code, the CLI maps those onto exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data. Carries a 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    explicit ParseError(const std::string& msg) : Error(msg), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Invalid configuration or invariant-violating arguments.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// External backend process died or could not be started.
class BackendLostError : public Error {
public:
    using Error::Error;
};

// Peer answered, but not in the documented wire format.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Non-finite weights or scores; aborts the run.
class NumericError : public Error {
public:
    using Error::Error;
};

// Interactive annotation was cancelled by the user.
class AbortedError : public Error {
public:
    using Error::Error;
};

} // namespace selftrain
