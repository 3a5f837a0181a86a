#pragma once

#include <stdexcept>
#include <string>

namespace lqp {

// Base for every domain error raised by the library. The CLI maps these to
// exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// An enumeration or materialization would exceed a configured cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class MissingEdge : public Error {
public:
    using Error::Error;
};

class NoSuchEdge : public Error {
public:
    using Error::Error;
};

// A construction produced nothing usable at this instance size.
class TooSmall : public Error {
public:
    using Error::Error;
};

class CertificationBudgetExceeded : public Error {
public:
    using Error::Error;
};

class SearchBudgetExceeded : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace lqp
