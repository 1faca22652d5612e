#pragma once

#include "scopetrack/comparison.hpp"
#include "scopetrack/model.hpp"
#include "scopetrack/store.hpp"
#include "scopetrack/timeline_ops.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace scopetrack;

inline constexpr FrameIndex kCaseFrames = 27000;
inline constexpr FrameRate kCaseFps{15, 1};

/// Annotate + tag helpers that fail loudly; fixtures are built only through
/// the public mutators.
std::string annotate(Timeline& t, FrameIndex start, FrameIndex end, char label);
std::string tag(Timeline& t, FrameIndex frame, std::optional<int> distance_cm,
                std::optional<std::string> findings = std::nullopt,
                std::optional<std::string> impressions = std::nullopt);

/// 27000 frames at 15 fps; an insertion pass R S D T A with blurry gaps, cecum
/// at [5400, 7500), then a full withdrawal pass A T D S R.
Timeline segmented_timeline(const std::string& procedure_id);

/// The four procedures of the comparison figure.
Timeline case1();
Timeline case2();
Timeline case3();
Timeline case4();

/// Case #2 geometry with the cecum reached late, so insertion >= withdrawal.
Timeline case2_slow_insertion();

// -----------------------------------------------------------------------------
// Random generation
// -----------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// Random text including quotes, escapes, control and non-ASCII characters.
std::string random_text(Rng& rng, std::size_t max_len = 24);

/// A timeline without Error diagnostics: non-overlapping segments with gaps,
/// anomalies of all three kinds (some outside segments, some overlapping),
/// tags of every classification.
Timeline random_valid_timeline(Rng& rng, const std::string& procedure_id);

/// Same, but always with at least one cecum annotation.
Timeline random_complete_timeline(Rng& rng, const std::string& procedure_id);

/// Valid timeline plus zero or more reports in assorted states.
ProjectFile random_project(Rng& rng, const std::string& procedure_id);

/// Case summary with at most `max_per_group` anomalies in each (label,
/// segment) group. Distances cluster in a narrow band so that many pairs fall
/// within matching range of each other.
CaseSummary random_summary(Rng& rng, const std::string& procedure_id, int max_per_group = 4);

}  // namespace fixtures
