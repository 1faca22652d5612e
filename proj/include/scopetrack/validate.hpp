#pragma once

#include "scopetrack/model.hpp"

#include <vector>

namespace scopetrack {

/// Checks every timeline invariant and the softer ordering/coverage rules.
///
/// Errors: SegmentOverlap, OutOfBounds, BadDistanceGranularity, EmptyTag.
/// Warnings: AnomalyOutsideSegment, SegmentOrder, PhaseRatio.
///
/// The result is sorted by (severity, frame); diagnostics sharing both keys
/// keep their detection order, so the output is fully deterministic.
[[nodiscard]] std::vector<Diagnostic> validate_timeline(const Timeline& timeline);

/// Throws Error{InvalidTimeline} listing the first error, if any.
void require_valid(const Timeline& timeline);

}  // namespace scopetrack
