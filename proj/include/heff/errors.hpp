#pragma once

#include <stdexcept>
#include <string>

namespace heff {

// Exit codes used by the CLI (and the exception types that map onto them).
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitNumericGuard = 4;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files / unknown names / bad flag values.
class ParseError : public Error {
public:
    using Error::Error;
};

// Violated structural preconditions (index ranges, space mismatches, empty
// term lists, non-positive frequencies, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

// Numeric guards: step-size limits, ill-conditioned averaged propagators,
// too-short averaging windows.
class NumericGuardError : public Error {
public:
    using Error::Error;
};

}  // namespace heff
