#pragma once

#include <stdexcept>
#include <string>

namespace ttrnn {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dimension/extent mismatch between tensors or factorization plans.
struct ShapeError : Error {
    using Error::Error;
};

/// Index outside the valid range of a tensor or sequence.
struct IndexError : Error {
    using Error::Error;
};

/// Invalid argument value (empty sequence, zero divisor, bad range).
struct ArgumentError : Error {
    using Error::Error;
};

/// Malformed or truncated file content (bad magic, version, payload).
struct FormatError : Error {
    using Error::Error;
};

/// Non-finite value where a finite one is required.
struct NumericsError : Error {
    using Error::Error;
};

/// Training loss became non-finite.
struct DivergedError : Error {
    using Error::Error;
};

/// Metric is undefined for the given inputs (e.g. no positive labels).
struct UndefinedMetricError : Error {
    using Error::Error;
};

/// Invalid run configuration (unknown key, inconsistent factors).
struct ConfigError : Error {
    using Error::Error;
};

} // namespace ttrnn
