#pragma once

#include "scopetrack/error.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scopetrack {

using FrameIndex = std::int64_t;

// =============================================================================
// Video
// =============================================================================

/// Frames per second as an exact ratio (e.g. 30000/1001 for NTSC).
struct FrameRate {
    std::int64_t num = 0;
    std::int64_t den = 1;

    [[nodiscard]] double per_second() const noexcept {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    /// Duration in seconds of `frames` frames.
    [[nodiscard]] double seconds(FrameIndex frames) const noexcept {
        return static_cast<double>(frames) * static_cast<double>(den) /
               static_cast<double>(num);
    }

    friend bool operator==(const FrameRate&, const FrameRate&) = default;
};

struct VideoMeta {
    std::string video_id;
    FrameIndex frame_count = 0;
    FrameRate fps;
    std::optional<std::string> source_uri;

    /// Validating constructor: frame_count >= 1, fps > 0.
    static VideoMeta make(std::string video_id, FrameIndex frame_count, FrameRate fps,
                          std::optional<std::string> source_uri = std::nullopt);

    [[nodiscard]] double duration_seconds() const noexcept { return fps.seconds(frame_count); }

    friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

// =============================================================================
// Labels
// =============================================================================

enum class LabelCode : char {
    Rectum = 'R',
    Sigmoid = 'S',
    Descending = 'D',
    Transverse = 'T',
    Ascending = 'A',
    Cecum = 'C',
    Polyp = 'P',
    Ibd = 'I',
    BloodClot = 'B',
};

enum class LabelKind { Segment, Anomaly };

inline constexpr std::array<LabelCode, 9> kAllLabels = {
    LabelCode::Rectum, LabelCode::Sigmoid, LabelCode::Descending,
    LabelCode::Transverse, LabelCode::Ascending, LabelCode::Cecum,
    LabelCode::Polyp, LabelCode::Ibd, LabelCode::BloodClot,
};

/// Segments in anatomical order, rectum first. Also the column order of the
/// comparison table.
inline constexpr std::array<LabelCode, 6> kSegmentLabels = {
    LabelCode::Rectum, LabelCode::Sigmoid, LabelCode::Descending,
    LabelCode::Transverse, LabelCode::Ascending, LabelCode::Cecum,
};

inline constexpr std::array<LabelCode, 3> kAnomalyLabels = {
    LabelCode::Polyp, LabelCode::Ibd, LabelCode::BloodClot,
};

inline constexpr int kLayerCount = 4;

class Label {
public:
    constexpr Label() = default;
    constexpr explicit Label(LabelCode code) : code_(code) {}

    [[nodiscard]] constexpr LabelCode code() const noexcept { return code_; }
    [[nodiscard]] constexpr char letter() const noexcept { return static_cast<char>(code_); }

    [[nodiscard]] constexpr LabelKind kind() const noexcept {
        switch (code_) {
            case LabelCode::Polyp:
            case LabelCode::Ibd:
            case LabelCode::BloodClot:
                return LabelKind::Anomaly;
            default:
                return LabelKind::Segment;
        }
    }
    [[nodiscard]] constexpr bool is_segment() const noexcept { return kind() == LabelKind::Segment; }

    /// Timeline row: 0 for every segment, then P=1, I=2, B=3.
    [[nodiscard]] constexpr int layer() const noexcept {
        switch (code_) {
            case LabelCode::Polyp: return 1;
            case LabelCode::Ibd: return 2;
            case LabelCode::BloodClot: return 3;
            default: return 0;
        }
    }

    /// R=0 .. C=5 for segments; nullopt for anomalies.
    [[nodiscard]] constexpr std::optional<int> anatomical_index() const noexcept {
        switch (code_) {
            case LabelCode::Rectum: return 0;
            case LabelCode::Sigmoid: return 1;
            case LabelCode::Descending: return 2;
            case LabelCode::Transverse: return 3;
            case LabelCode::Ascending: return 4;
            case LabelCode::Cecum: return 5;
            default: return std::nullopt;
        }
    }

    /// Lower-case display name ("transverse", "blood clot", "IBD").
    [[nodiscard]] std::string_view name() const noexcept;

    friend constexpr bool operator==(Label, Label) = default;
    friend constexpr auto operator<=>(Label a, Label b) {
        return static_cast<char>(a.code_) <=> static_cast<char>(b.code_);
    }

private:
    LabelCode code_ = LabelCode::Rectum;
};

/// Throws Error{UnknownLabelCode} for anything outside R S D T A C P I B.
[[nodiscard]] Label label_from_code(char code);

// =============================================================================
// Timeline contents
// =============================================================================

/// Half-open frame range [start_frame, end_frame).
struct Interval {
    FrameIndex start_frame = 0;
    FrameIndex end_frame = 0;

    /// Maps a press/release drag onto an interval; reversed drags are swapped.
    [[nodiscard]] static Interval from_gesture(FrameIndex press, FrameIndex release) noexcept {
        return press <= release ? Interval{press, release} : Interval{release, press};
    }

    [[nodiscard]] FrameIndex length() const noexcept { return end_frame - start_frame; }
    [[nodiscard]] bool contains(FrameIndex frame) const noexcept {
        return start_frame <= frame && frame < end_frame;
    }
    [[nodiscard]] bool intersects(const Interval& other) const noexcept {
        return start_frame < other.end_frame && other.start_frame < end_frame;
    }
    [[nodiscard]] FrameIndex overlap(const Interval& other) const noexcept;
    /// 0 <= start < end <= frame_count.
    [[nodiscard]] bool within(FrameIndex frame_count) const noexcept {
        return 0 <= start_frame && start_frame < end_frame && end_frame <= frame_count;
    }

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Annotation {
    std::string annotation_id;
    Interval interval;
    Label label;
    std::optional<std::string> note;

    [[nodiscard]] int layer() const noexcept { return label.layer(); }

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

enum class TagOrigin { Manual, Transcript };
enum class TagClass { DistanceMark, FullTag };

struct Tag {
    std::string tag_id;
    FrameIndex frame = 0;
    std::optional<int> distance_cm;
    std::optional<std::string> findings;
    std::optional<std::string> impressions;
    TagOrigin origin = TagOrigin::Manual;

    /// A tag carrying only a distance is a distance mark.
    [[nodiscard]] TagClass classification() const noexcept {
        return (!findings && !impressions && distance_cm) ? TagClass::DistanceMark : TagClass::FullTag;
    }
    [[nodiscard]] bool is_empty() const noexcept { return !distance_cm && !findings && !impressions; }

    friend bool operator==(const Tag&, const Tag&) = default;
};

inline constexpr int kDistanceStepCm = 5;

[[nodiscard]] constexpr bool valid_distance(int cm) noexcept {
    return cm >= 0 && cm % kDistanceStepCm == 0;
}

/// ISO calendar date, kept as text (YYYY-MM-DD) once validated.
struct CalendarDate {
    int year = 0;
    unsigned month = 0;
    unsigned day = 0;

    /// Throws Error{InvalidTimeline} for anything not a real YYYY-MM-DD date.
    static CalendarDate parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const CalendarDate&, const CalendarDate&) = default;
};

struct Timeline {
    std::string procedure_id;
    VideoMeta video;
    std::vector<Annotation> annotations;
    std::vector<Tag> tags;
    std::optional<std::string> patient_ref;
    std::optional<CalendarDate> procedure_date;

    [[nodiscard]] const Annotation* find_annotation(std::string_view id) const noexcept;
    [[nodiscard]] const Tag* find_tag(std::string_view id) const noexcept;

    friend bool operator==(const Timeline&, const Timeline&) = default;
};

/// Empty timeline for a procedure.
[[nodiscard]] Timeline make_timeline(std::string procedure_id, VideoMeta video);

// =============================================================================
// Diagnostics
// =============================================================================

enum class Severity { Error = 0, Warning = 1 };

enum class DiagnosticCode {
    SegmentOverlap,
    OutOfBounds,
    BadDistanceGranularity,
    EmptyTag,
    AnomalyOutsideSegment,
    SegmentOrder,
    PhaseRatio,
    DistanceSnapped,
};

struct Diagnostic {
    Severity severity = Severity::Warning;
    DiagnosticCode code = DiagnosticCode::SegmentOrder;
    std::string message;
    std::optional<std::string> subject;
    /// Frame the diagnostic is anchored at; used for ordering.
    FrameIndex frame = 0;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

[[nodiscard]] std::string_view to_string(Severity s) noexcept;
[[nodiscard]] std::string_view to_string(DiagnosticCode c) noexcept;
[[nodiscard]] std::string_view to_string(TagOrigin o) noexcept;
[[nodiscard]] std::string_view to_string(TagClass c) noexcept;

[[nodiscard]] inline bool has_errors(const std::vector<Diagnostic>& diagnostics) noexcept {
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) return true;
    }
    return false;
}

}  // namespace scopetrack
