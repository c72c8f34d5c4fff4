#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crawlq {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-conformable or otherwise wrong matrix shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double rcond)
        : Error(what + " (reciprocal condition estimate " + std::to_string(rcond) + ")"),
          rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// A generator whose null space is not one-dimensional.
class DegenerateChainError : public Error {
public:
    using Error::Error;
};

/// Input that violates one or more model invariants. Every violation is listed.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& s : issues) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out.empty() ? std::string("validation failed") : out;
    }
    std::vector<std::string> issues_;
};

/// State space too large for the dense representation.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A solver applied to a generator it does not support.
class WrongSolverError : public Error {
public:
    using Error::Error;
};

/// A report is missing a quantity the caller needs.
class IncompleteReportError : public Error {
public:
    using Error::Error;
};

}  // namespace crawlq
