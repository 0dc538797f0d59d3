#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A domain object violates one of its invariants (bad range, count, tau <= 0, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The post-selected spectral function vanishes on the grid; no state to normalize.
class NullKernelError : public Error {
public:
    using Error::Error;
};

/// LAPACK did not converge.
class DecompositionError : public Error {
public:
    using Error::Error;
};

/// Round-off produced something that cannot be a probability (e.g. a clearly negative eigenvalue).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration text. Carries the 1-based line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace biphoton
