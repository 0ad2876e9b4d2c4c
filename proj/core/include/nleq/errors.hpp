#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nleq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not match what an operation requires.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Bad user input: unknown names, empty lists, invalid option values.
class InputError : public Error {
public:
    using Error::Error;
};

class UnknownProblemError : public InputError {
public:
    explicit UnknownProblemError(std::string id)
        : InputError("unrecognized problem: " + id), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

/// A pivot fell below the singularity threshold during factorization.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot)
        : Error(what), pivot_(pivot) {}
    double pivot() const noexcept { return pivot_; }

private:
    double pivot_;
};

/// The residual (or objective) returned a non-finite value.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::vector<double> point,
                    std::ptrdiff_t column = -1)
        : Error(what), point_(std::move(point)), column_(column) {}

    const std::vector<double>& point() const noexcept { return point_; }
    /// Perturbed Jacobian column that failed, or -1 when not applicable.
    std::ptrdiff_t column() const noexcept { return column_; }

private:
    std::vector<double> point_;
    std::ptrdiff_t column_;
};

/// A step of zero length was passed to an update formula.
class DegenerateStepError : public Error {
public:
    using Error::Error;
};

}  // namespace nleq
