#pragma once

#include <stdexcept>
#include <string>

namespace pstrat {

// Error kinds, used by the CLI to map failures onto exit codes.
enum class ErrorKind {
    Usage,              // bad arguments, malformed input, misuse of an operation
    PrecisionExhausted, // the answer depends on digits beyond the working precision
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

// Raised when a query cannot be decided at precision m (the offending point
// and atom are part of the message).
struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& what)
        : Error(ErrorKind::PrecisionExhausted, what) {}
};

struct ZeroVectorError : UsageError {
    ZeroVectorError() : UsageError("dir() is undefined on the zero vector (valuation is infinite)") {}
};

struct NotUnimodularError : UsageError {
    NotUnimodularError() : UsageError("matrix does not act on leading terms: v(det) > 0") {}
};

struct AtMaxDepthError : UsageError {
    AtMaxDepthError() : UsageError("ball at maximal depth has no children") {}
};

struct EqualPointsError : UsageError {
    EqualPointsError() : UsageError("points coincide at working precision; no smallest ball") {}
};

struct DomainMismatchError : UsageError {
    explicit DomainMismatchError(const std::string& what) : UsageError(what) {}
};

struct NotBijectiveError : UsageError {
    NotBijectiveError() : UsageError("map is not a bijection of the ball's points") {}
};

struct NotRisometryError : UsageError {
    NotRisometryError() : UsageError("map does not preserve leading terms of differences") {}
};

struct DepthMismatchError : UsageError {
    DepthMismatchError() : UsageError("balls have different depths") {}
};

struct EmptySetError : UsageError {
    explicit EmptySetError(const std::string& what = "operation undefined on the empty set")
        : UsageError(what) {}
};

struct UnknownFixtureError : UsageError {
    explicit UnknownFixtureError(const std::string& name)
        : UsageError("unknown fixture: " + name) {}
};

struct UnknownFormatError : UsageError {
    explicit UnknownFormatError(const std::string& name)
        : UsageError("unknown export format: " + name) {}
};

struct NotATStratificationError : UsageError {
    NotATStratificationError() : UsageError("partition fails the stratification axioms") {}
};

struct NotExhibitingError : UsageError {
    NotExhibitingError() : UsageError("projection does not exhibit the required subspace") {}
};

struct NotVerifiedError : UsageError {
    explicit NotVerifiedError(const std::string& what) : UsageError(what) {}
};

struct BudgetExhaustedError : UsageError {
    explicit BudgetExhaustedError(const std::string& what) : UsageError(what) {}
};

struct PreconditionFailed : UsageError {
    explicit PreconditionFailed(const std::string& clause)
        : UsageError("precondition violated: " + clause) {}
};

} // namespace pstrat
