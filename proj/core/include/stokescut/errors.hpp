#pragma once

#include <stdexcept>
#include <string>

namespace stokescut {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid mesh/domain input (degenerate rectangle, too-coarse subdivision, ...).
struct InvalidDomainError : Error {
    using Error::Error;
};

/// The interface geometry violates the resolvability assumptions on some element.
struct AssumptionViolation : Error {
    int element = -1;
    AssumptionViolation(const std::string &what, int element_)
        : Error(what + " (element " + std::to_string(element_) + ")"), element(element_) {}
};

/// A face-path search did not reach any admissible element.
struct SearchFailure : Error {
    using Error::Error;
};

/// Evaluation requested outside the domain covered by the side's mesh.
struct OutOfDomainError : Error {
    using Error::Error;
};

/// Bad ProblemConfig value.
struct ConfigError : Error {
    using Error::Error;
};

/// Direct factorization failed (structurally or numerically singular matrix).
struct SingularSystemError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace stokescut
