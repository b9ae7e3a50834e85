#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subjidx {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input data. Carries a 1-based line number when one is known
/// (0 means "not line-specific").
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

/// The same id was defined twice where ids must be unique.
class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& id, std::size_t line = 0)
        : Error(line ? "duplicate id \"" + id + "\" at line " + std::to_string(line)
                     : "duplicate id \"" + id + "\""),
          id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

/// A required field was absent from a record.
class MissingFieldError : public Error {
public:
    MissingFieldError(const std::string& field, std::size_t line)
        : Error("line " + std::to_string(line) + ": missing field \"" + field + "\""),
          field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Subsetting a vocabulary produced no subjects.
class EmptySubsetError : public Error {
public:
    using Error::Error;
};

/// Record ids collided when corpora were combined.
class IdCollisionError : public Error {
public:
    using Error::Error;
};

/// A data contract was violated (sizes, bounds, orderings).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Vectorizer fitting removed every feature.
class EmptyFeatureSpaceError : public Error {
public:
    using Error::Error;
};

/// Training produced no examples to learn from.
class NoTrainingSignalError : public Error {
public:
    using Error::Error;
};

/// Ensemble weights are not a valid probability simplex.
class SimplexViolationError : public Error {
public:
    using Error::Error;
};

/// A configuration entry references a project that does not exist.
class DanglingReferenceError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or inconsistent settings.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Command-line usage error (maps to exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Base for errors talking to a chat-completion endpoint.
class LlmError : public Error {
public:
    using Error::Error;
};

/// Endpoint returned an empty completion.
class EmptyResponseError : public LlmError {
public:
    explicit EmptyResponseError(const std::string& context)
        : LlmError("empty response: " + context) {}
};

/// Numbered-list reply did not match the request batch.
class NumberingMismatchError : public LlmError {
public:
    using LlmError::LlmError;
};

/// Request failed after all retries.
class TransportError : public LlmError {
public:
    using LlmError::LlmError;
};

}  // namespace subjidx
