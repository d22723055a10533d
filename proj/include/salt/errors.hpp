#pragma once

#include <stdexcept>
#include <string>

namespace salt {

// Shape or grid mismatch, bad wavenumber, odd grid size.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite state or runaway energy during time stepping.
class BlowUpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Estimator cannot produce a value (degenerate denominator, zero eigenvalues).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input file that the caller asked for does not exist.
class MissingInputError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace salt
