#pragma once

#include <stdexcept>
#include <string>

namespace mcmon {

// Base of every error raised by the library. The CLI maps any Error to the
// data-error exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes of two operands disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A value violates a documented precondition (non-finite input, bad range).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Fewer than two classes, or otherwise no class structure to exploit.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// Within-class scatter is exactly zero, so the Fisher ratio is unbounded.
class InfiniteSeparationError : public Error {
public:
    using Error::Error;
};

// Requested number of features exceeds what the data can support.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Covariance matrix is singular or too ill-conditioned to invert.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Phase-I purging left too few points to fit a chart.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class ModelFileError : public Error {
public:
    enum class Kind { Io, Version, Checksum, Format };

    ModelFileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace mcmon
