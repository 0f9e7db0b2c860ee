#pragma once

#include <stdexcept>
#include <string>

namespace optstop {

/// Raised when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed after valid input (non-convergence, empty sets).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// PSOR did not reach its tolerance within the iteration budget.
class SolverError : public NumericalError {
public:
    SolverError(const std::string& what, double worst_residual)
        : NumericalError(what), worst_residual_(worst_residual) {}

    double worst_residual() const noexcept { return worst_residual_; }

private:
    double worst_residual_;
};

/// The exercise region could not be read off a solved grid.
class ExtractionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The grid is too coarse for the requested approach sequence.
class ResolutionError : public NumericalError {
public:
    ResolutionError(const std::string& what, std::size_t required_cells)
        : NumericalError(what), required_cells_(required_cells) {}

    std::size_t required_cells() const noexcept { return required_cells_; }

private:
    std::size_t required_cells_;
};

/// A diagnostic had nothing to evaluate (e.g. no qualifying grid nodes).
class DiagnosticError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace optstop
