// errors.hpp — Error types for numerical failures in the simulation pipeline.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrc {

// Raised when the fixed-step integrator leaves its validity regime
// (trace drift beyond tolerance, usually a too-large step).
class IntegratorDivergenceError : public std::runtime_error {
public:
    explicit IntegratorDivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a state acquires an eigenvalue below the negativity tolerance.
class PositivityViolationError : public std::runtime_error {
public:
    explicit PositivityViolationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the population at the truncation edge exceeds the configured
// guard, i.e. the Fock cutoff is no longer trustworthy for this drive.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, std::size_t sample_index)
        : std::runtime_error(what), sample_index(sample_index) {}
    std::size_t sample_index = 0;
};

// Raised by the classical oscillator baseline when the power variable leaves
// [0, 1] beyond tolerance (step too large for the chosen rates).
class InstabilityError : public std::runtime_error {
public:
    explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration / CLI errors map to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qrc
