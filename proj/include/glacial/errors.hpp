#pragma once

#include <stdexcept>
#include <string>

namespace glacial {

/// Base class for failures of a numerical procedure (as opposed to bad input).
/// The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive step size fell below the representable resolution of the time axis.
class StepSizeUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Bisection on a boundary crossing did not reach the event tolerance.
class CrossingNotConverged : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// No convex combination of the two regime fields is tangent to the boundary.
class NotSliding : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A section map was applied outside its domain, or the flow did not return
/// to the required part of the switching plane.
class MapUndefined : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Fixed-point iteration of the composite section map did not converge.
class NoOrbitFound : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Malformed configuration. Carries the offending line (0 when the error came
/// from a command-line override) and key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0, std::string key = {})
        : std::runtime_error(format(message, line, key)), line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(const std::string& message, int line, const std::string& key) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "'" + key + "': ";
        return out + message;
    }

    int line_;
    std::string key_;
};

}  // namespace glacial
