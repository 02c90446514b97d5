#pragma once

#include <stdexcept>
#include <string>

namespace abmcalib {

/// Invalid argument to a library operation (bad dimensions, out-of-range
/// coordinates, malformed domain values).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation invoked on an object in the wrong state (e.g. untrained forest).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Configuration file rejected; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulator run failed (nonzero exit, crash); carries its diagnostics.
class SimulatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulator run exceeded its wall-clock allowance.
class TimeoutError : public SimulatorError {
public:
    using SimulatorError::SimulatorError;
};

/// A data file could not be parsed; message names the file and line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_(file), line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Filesystem-level failure; maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace abmcalib
