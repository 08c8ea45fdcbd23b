#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

/// Malformed or out-of-range input (non-finite values, non-positive scales).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sampling grid or table is too coarse to resolve the requested quantity.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called on data violating its documented precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Inconsistent combinatorial data (missing faces, bad incidences).
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A filling search exhausted its radius budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation left the sampled region of a form.
class RegionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A group model cannot perform the requested operation (e.g. no logarithm at a point).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace orlicz
