#pragma once

#include "scopetrack/model.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scopetrack {

/// Result of a mutator: the new timeline plus the id it assigned.
struct Mutation {
    Timeline timeline;
    std::string id;
};

/// Throws OutOfBounds or SegmentOverlap. The input timeline is never modified.
[[nodiscard]] Mutation add_annotation(const Timeline& timeline, Interval interval, Label label,
                                      std::optional<std::string> note = std::nullopt);

/// Throws UnknownAnnotation.
[[nodiscard]] Timeline remove_annotation(const Timeline& timeline, std::string_view annotation_id);

/// Empty or blank findings/impressions strings count as absent.
/// Throws EmptyTag, BadDistanceGranularity or OutOfBounds.
[[nodiscard]] Mutation add_tag(const Timeline& timeline, FrameIndex frame,
                               std::optional<int> distance_cm,
                               std::optional<std::string> findings,
                               std::optional<std::string> impressions,
                               TagOrigin origin = TagOrigin::Manual);

// -----------------------------------------------------------------------------
// Phase times
// -----------------------------------------------------------------------------

/// Insertion runs from frame 0 to the start of the first cecum annotation,
/// withdrawal from its end to the last frame. Dwell is the cecum interval.
struct PhaseTimes {
    bool complete = false;
    std::optional<double> insertion_s;
    std::optional<double> cecum_dwell_s;
    std::optional<double> withdrawal_s;

    friend bool operator==(const PhaseTimes&, const PhaseTimes&) = default;
};

/// Same split in whole frames; sums to frame_count exactly.
struct PhaseFrames {
    FrameIndex insertion = 0;
    FrameIndex cecum_dwell = 0;
    FrameIndex withdrawal = 0;
};

/// Earliest cecum annotation by start frame, or nullptr.
[[nodiscard]] const Annotation* first_cecum(const Timeline& timeline) noexcept;

[[nodiscard]] std::optional<PhaseFrames> compute_phase_frames(const Timeline& timeline) noexcept;
[[nodiscard]] PhaseTimes compute_phase_times(const Timeline& timeline) noexcept;

/// True when a complete timeline has insertion >= withdrawal.
[[nodiscard]] bool phase_ratio_violated(const PhaseTimes& times) noexcept;

// -----------------------------------------------------------------------------
// Queries
// -----------------------------------------------------------------------------

/// Segment whose interval contains `frame`; nullopt inside a gap.
/// Throws OutOfBounds for frames outside [0, frame_count).
[[nodiscard]] std::optional<Label> segment_at(const Timeline& timeline, FrameIndex frame);

struct LayoutEntry {
    Interval interval;
    Label label;
    std::string annotation_id;

    friend bool operator==(const LayoutEntry&, const LayoutEntry&) = default;
};

struct LayoutRow {
    int layer = 0;
    std::vector<LayoutEntry> entries;

    friend bool operator==(const LayoutRow&, const LayoutRow&) = default;
};

using Layout = std::array<LayoutRow, kLayerCount>;

/// One row per layer, entries ordered by (start, end, id).
/// Throws InvalidTimeline when the timeline has Error diagnostics.
[[nodiscard]] Layout hierarchy_layout(const Timeline& timeline);

}  // namespace scopetrack
