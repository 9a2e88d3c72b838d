#pragma once

#include <stdexcept>
#include <string>

namespace branching {

/// Input violates an operation's precondition (e.g. h > l for a cell builder).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside the deformation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Pointwise second gradient requested on a cell boundary.
class BoundaryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent schedule / domain combination during assembly.
class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate or malformed mesh.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Samples do not satisfy the hypotheses of an inequality check.
class HypothesisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace branching
