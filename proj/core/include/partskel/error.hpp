#pragma once

#include <stdexcept>
#include <string>

namespace partskel {

/// Base for every error raised by the toolkit.
///
/// Two families exist: `ValidationError` for inputs that violate a documented
/// contract (bad schema, mismatched shapes, bad config) and `IoError` for
/// filesystem or codec failures. The CLI maps them to exit codes 1 and 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// pose ingest
class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class AlignmentError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class FusionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class AnalysisError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// gaitlab
class FeatureError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class PoolingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class EmbedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class LossError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
/// Raised when a gradient is requested exactly on a hinge kink.
class NonDifferentiableError : public LossError {
public:
    using LossError::LossError;
};
class EvaluationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Malformed `PSTN1` container. Carries the byte offset where decoding failed.
class ContainerError : public ValidationError {
public:
    ContainerError(const std::string& what, std::size_t offset)
        : ValidationError(what + " (at byte offset " + std::to_string(offset) + ")"),
          reason_(what),
          offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
    std::size_t offset_;
};

class ReportError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace partskel
