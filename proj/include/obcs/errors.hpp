#ifndef OBCS_ERRORS_HPP
#define OBCS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace obcs {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Incompatible or out-of-range dimensions (e.g. s > n, mismatched vector sizes).
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

// A^T y is identically zero; the first index is undefined.
class DegenerateMeasurementError : public Error {
public:
    explicit DegenerateMeasurementError(const std::string& what) : Error(what) {}
};

// |y^T A_{j0}| is below the scale-aware threshold; the reduction is ill-posed.
class PivotDegenerateError : public Error {
public:
    explicit PivotDegenerateError(const std::string& what) : Error(what) {}
};

// Non-finite value encountered inside an iterative solve.
class NumericError : public Error {
public:
    NumericError(const std::string& what, long iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration(iteration) {}
    long iteration;
};

// Malformed config file, CLI arguments, or data file.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace obcs

#endif
