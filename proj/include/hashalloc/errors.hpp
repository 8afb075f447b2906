#pragma once

#include <stdexcept>
#include <string>

namespace hashalloc {

// Argument outside the mathematical domain of an operation (zero rates,
// shares outside [0,1], divide-by-zero components).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Caller-supplied values violate a stated precondition that is not a simple
// domain bound, e.g. the simplex constraint on (x, y) scale factors.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (CSV rows, scenario files, fixtures).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hashalloc
