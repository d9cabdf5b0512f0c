#pragma once

#include <stdexcept>
#include <string>

namespace gbmstop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class IllPosedReason { NonPositiveVariance, ComplexRoots, EqualRoots, NonFinite };

class IllPosedError : public Error {
public:
    IllPosedError(IllPosedReason reason, const std::string& what)
        : Error(what), reason_(reason) {}
    IllPosedReason reason() const { return reason_; }

private:
    IllPosedReason reason_;
};

/// Profit function violates the admissible sign pattern (more than two sign changes etc).
class UnsupportedShapeError : public Error {
public:
    using Error::Error;
};

class BadParametersError : public Error {
public:
    using Error::Error;
};

/// Improper integral diverges; sign() is the sign of the divergence (+1 or -1).
class DivergentError : public Error {
public:
    DivergentError(int sign, const std::string& what) : Error(what), sign_(sign) {}
    int sign() const { return sign_; }

private:
    int sign_;
};

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

class BracketFailureError : public Error {
public:
    using Error::Error;
};

class NotIntegrableError : public Error {
public:
    using Error::Error;
};

class NotApplicableError : public Error {
public:
    using Error::Error;
};

class TruncationDominatesError : public Error {
public:
    using Error::Error;
};

}  // namespace gbmstop
