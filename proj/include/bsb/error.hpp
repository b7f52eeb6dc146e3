#pragma once

#include <stdexcept>
#include <string>

namespace bsb {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector/matrix dimensions disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A non-finite value appeared during the dynamics (distinct from hitting
// max_iters, which is reported through RecallTrace::converged).
class DivergenceError : public Error {
public:
    using Error::Error;
};

// An argument violates a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Exhaustive analysis requested above the enumeration bound.
class EnumerationBoundError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// Text or image could not be mapped to a bipolar pattern.
class EncodingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bsb
