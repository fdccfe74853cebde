#pragma once

#include <stdexcept>
#include <string>

namespace icregion {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An instance violates a type invariant (row sums, size bounds, |Q| bound, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A raw Gaussian instance cannot be brought to canonical form.
class CanonicalizationError : public Error {
public:
    using Error::Error;
};

// Query or argument shapes do not match the instance.
class DimensionError : public Error {
public:
    using Error::Error;
};

// The interference conditions required by an operation do not hold.
class ConditionError : public Error {
public:
    using Error::Error;
};

// A stated precondition of an operation is not met.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Problem size exceeds the supported desk scale.
class ScaleError : public Error {
public:
    using Error::Error;
};

// A 2D slice at the requested fixed rates is empty.
class EmptySliceError : public Error {
public:
    using Error::Error;
};

}  // namespace icregion
