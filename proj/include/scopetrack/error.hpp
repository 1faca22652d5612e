#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scopetrack {

enum class ErrorCode {
    UnknownLabelCode,
    InvalidVideoMeta,
    OutOfBounds,
    SegmentOverlap,
    UnknownAnnotation,
    EmptyTag,
    BadDistanceGranularity,
    InvalidTimeline,
    AlreadyComplete,
    MissingRecommendation,
    UnlocatedFinding,
    EmptyInput,
    BadThreshold,
    IoFailure,
    SchemaVersionUnsupported,
    CorruptFile,
    BindFailure,
    RevisionConflict,
    UnknownProcedure,
    ProcedureExists,
    NoReport,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every failing operation in the library throws this. `subject` names the
/// offending annotation/tag id when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string subject = {})
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          subject_(std::move(subject)) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string subject_;
};

}  // namespace scopetrack
