#pragma once

#include <stdexcept>
#include <string>

namespace sarmoco {

/// Invalid or incomplete run configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerically unsolvable problem, e.g. an unobservable velocity component
/// in the weighted least squares inversion. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable binary/JSON file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sarmoco
