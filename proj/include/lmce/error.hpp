#pragma once

#include <stdexcept>
#include <string>

namespace lmce {

/// Raised when an operation is called outside its domain of validity
/// (radius beyond the grid, phase out of range, grids that do not match...).
/// Malformed construction arguments use std::invalid_argument instead.
class PreconditionError : public std::domain_error {
public:
    explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

/// Raised by drivers that require a converged Newton solve.
class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lmce
