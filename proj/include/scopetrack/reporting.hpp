#pragma once

#include "scopetrack/model.hpp"
#include "scopetrack/timeline_ops.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scopetrack {

enum class CompoundAttribute { WithBloodClot };

[[nodiscard]] std::string_view to_string(CompoundAttribute a) noexcept;

/// One anomaly as it appears in the report's findings section.
struct FindingEntry {
    /// Source P/I/B annotation.
    std::string annotation_id;
    Label anomaly_label;
    std::optional<Label> segment;
    std::optional<int> distance_cm;
    std::optional<std::string> findings_text;
    std::optional<std::string> impressions_text;
    FrameIndex snapshot_frame = 0;
    std::set<CompoundAttribute> compound_attributes;
    /// Blood-clot annotations folded into this entry as WithBloodClot.
    std::vector<std::string> attached_annotation_ids;

    friend bool operator==(const FindingEntry&, const FindingEntry&) = default;
};

/// Tags farther than this many frames from an anomaly interval never lend it
/// their distance (10 s at 15 fps).
inline constexpr FrameIndex kDistanceWindowFrames = 150;

/// Turns the P/I/B annotations of a timeline into finding entries:
///  - one entry per P and per I annotation;
///  - a B annotation overlapping some P becomes WithBloodClot on the P it
///    overlaps most (ties: earlier P, then lower id); otherwise its own entry;
///  - segment is the segment under the anomaly's first frame;
///  - distance comes from the nearest distance-bearing tag within
///    kDistanceWindowFrames of the interval (ties: earlier tag);
///  - findings/impressions text is copied from the earliest full tag inside
///    the interval.
/// Entries are sorted by distance descending, absent distances last, then by
/// snapshot frame.
///
/// Shared by report generation and case comparison so that both always agree.
[[nodiscard]] std::vector<FindingEntry> derive_findings(const Timeline& timeline);

// -----------------------------------------------------------------------------
// Report
// -----------------------------------------------------------------------------

enum class ReportStatus { Draft, Complete };

[[nodiscard]] std::string_view to_string(ReportStatus s) noexcept;

/// Free-form prior patient information. The keys general_information,
/// clinical_history_and_physicals, consent and medications are copied into the
/// report; anything else is ignored.
using PatientContext = std::map<std::string, std::string>;

struct ManualSections {
    std::string preparation;
    std::string procedure_notes;
    std::string complications;
    std::string recommendations;

    friend bool operator==(const ManualSections&, const ManualSections&) = default;
};

struct Report {
    std::string procedure_id;

    // Filled from the timeline and patient context.
    std::string general_information;
    std::string clinical_history_and_physicals;
    std::string consent;
    std::string medications;
    std::vector<FindingEntry> findings;
    std::string impressions;

    // Filled by the physician.
    ManualSections manual;

    PhaseTimes phase_times;
    ReportStatus status = ReportStatus::Draft;

    friend bool operator==(const Report&, const Report&) = default;
};

/// Draft report. Throws InvalidTimeline when the timeline has Error diagnostics.
[[nodiscard]] Report generate_report(const Timeline& timeline, const PatientContext& patient_context = {});

/// Throws AlreadyComplete on a finalized report.
[[nodiscard]] Report set_manual_sections(const Report& report, ManualSections sections);

/// Marks the report Complete. Throws AlreadyComplete, MissingRecommendation,
/// or UnlocatedFinding (subject = annotation id).
[[nodiscard]] Report finalize_report(const Report& report);

enum class RenderFormat { Structured, Document };

/// Structured is the canonical JSON object; Document is plain text with the
/// sections in the order of the printed report form.
[[nodiscard]] std::string render_report(const Report& report, RenderFormat format);

/// Inverse of render_report(..., Structured). Throws CorruptFile.
[[nodiscard]] Report parse_structured_report(std::string_view bytes);

/// "polyp — transverse — 100 cm from anus — frame 5200"
[[nodiscard]] std::string finding_line(const FindingEntry& entry);

}  // namespace scopetrack
