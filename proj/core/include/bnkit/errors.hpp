#pragma once

#include <stdexcept>
#include <string>

namespace bnkit {

// Base class for all conditions the library raises. Everything carries a
// human-readable message; callers that care about the kind catch the
// concrete type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A structure contains a directed cycle.
class CyclicStructureError : public Error {
public:
    using Error::Error;
};

// A full assignment left one or more variables without a value.
class IncompleteAssignmentError : public Error {
public:
    using Error::Error;
};

// The conditioning event has probability zero, so P(Z|Y) is undefined.
class ZeroProbabilityEvidenceError : public Error {
public:
    using Error::Error;
};

// An enumeration-based operation was asked to run above its size guard.
class TooManyVariablesError : public Error {
public:
    using Error::Error;
};

// Two inputs that must share a variable list (names and value labels,
// in order) do not.
class VariableMismatchError : public Error {
public:
    using Error::Error;
};

// A database case carries a value index outside its variable's range.
class IncompleteDatabaseError : public Error {
public:
    using Error::Error;
};

// A network failed validation where a valid one is required.
class InvalidNetworkError : public Error {
public:
    using Error::Error;
};

// Text input (network or case file) could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line)
        : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& message) : Error(message), line_(0) {}

    int line() const { return line_; }

private:
    int line_;
};

}  // namespace bnkit
