#pragma once

#include <stdexcept>
#include <string>

namespace plaudit {

/// Base class for every error the library raises on purpose.
class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exact tie makes the outcome undecidable without an external
/// tie-break, so no assertion set can certify it; callers should
/// escalate to a full count.
class TieError : public AuditError {
public:
    using AuditError::AuditError;
};

/// A numeric argument is outside the range where the operation is defined.
class DomainError : public AuditError {
public:
    using AuditError::AuditError;
};

/// An API contract was violated by the caller.
class PreconditionError : public AuditError {
public:
    using AuditError::AuditError;
};

/// A model object violates one of its structural invariants.
class ValidationError : public AuditError {
public:
    using AuditError::AuditError;
};

/// An interpreted ballot breaks the per-ballot vote caps. This always
/// signals a bug or corruption upstream of tabulation, never voter error.
class BallotOutOfBounds : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// An identifier does not name any party or candidate of the contest.
class UnknownEntityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Input text could not be parsed.
class ParseError : public AuditError {
public:
    explicit ParseError(const std::string& msg) : AuditError(msg) {}
    ParseError(long long line, const std::string& msg)
        : AuditError("line " + std::to_string(line) + ": " + msg) {}
};

/// A ballot record is structurally malformed (unknown candidate key,
/// negative count, bad field syntax). Distinct from a spoiled ballot:
/// spoilage is a voter-level condition and yields a valid=false ballot,
/// while malformed input aborts processing.
class InputFormatError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace plaudit
