#pragma once

#include "scopetrack/model.hpp"
#include "scopetrack/reporting.hpp"
#include "scopetrack/timeline_ops.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scopetrack {

struct AnomalyRecord {
    std::string annotation_id;
    Label label;
    std::optional<Label> segment;
    std::optional<int> distance_cm;
    std::set<CompoundAttribute> compound_attributes;

    friend bool operator==(const AnomalyRecord&, const AnomalyRecord&) = default;
};

/// Per-procedure digest. `counts_by_segment` uses nullopt for anomalies that
/// start in a segment gap; its grand total always equals anomalies.size().
struct CaseSummary {
    std::string procedure_id;
    std::vector<AnomalyRecord> anomalies;
    std::map<std::optional<Label>, std::map<Label, int>> counts_by_segment;
    PhaseTimes phase_times;
    bool complete = false;

    friend bool operator==(const CaseSummary&, const CaseSummary&) = default;
};

/// Throws InvalidTimeline. Anomalies follow derive_findings exactly.
[[nodiscard]] CaseSummary summarize_case(const Timeline& timeline);

// -----------------------------------------------------------------------------
// Comparison table
// -----------------------------------------------------------------------------

struct AnomalyCounts {
    int polyp = 0;
    int ibd = 0;
    int blood_clot = 0;

    [[nodiscard]] int total() const noexcept { return polyp + ibd + blood_clot; }
    friend bool operator==(const AnomalyCounts&, const AnomalyCounts&) = default;
};

struct ComparisonRow {
    std::string procedure_id;
    /// Columns in kSegmentLabels order: R S D T A C.
    std::array<AnomalyCounts, 6> per_segment{};
    /// Anomalies outside every segment; not a table column.
    int unlocated = 0;
    std::optional<double> insertion_s;
    std::optional<double> withdrawal_s;
    bool complete = false;
    /// insertion_s >= withdrawal_s on a complete procedure.
    bool phase_ratio = false;

    [[nodiscard]] int total() const noexcept;
    friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    friend bool operator==(const ComparisonTable&, const ComparisonTable&) = default;
};

/// One row per summary, in input order. Throws EmptyInput.
[[nodiscard]] ComparisonTable compare_cases(const std::vector<CaseSummary>& summaries);

/// `case,R,S,D,T,A,C,insertion_s,withdrawal_s,complete` followed by one line
/// per row; cells are `P<i>/I<j>/B<k>`, times have one decimal, "—" when absent.
[[nodiscard]] std::string to_csv(const ComparisonTable& table);

// -----------------------------------------------------------------------------
// Follow-up alignment
// -----------------------------------------------------------------------------

enum class MatchStatus { Matched, OnlyLeft, OnlyRight };

[[nodiscard]] std::string_view to_string(MatchStatus s) noexcept;

struct AnomalyMatch {
    /// Indices into left.anomalies / right.anomalies.
    std::optional<std::size_t> left;
    std::optional<std::size_t> right;
    /// right distance minus left distance; 0 unless both distances are known.
    int delta_distance_cm = 0;
    MatchStatus status = MatchStatus::Matched;

    friend bool operator==(const AnomalyMatch&, const AnomalyMatch&) = default;
};

enum class MatchStrategy {
    /// Within each (label, segment) group: as many pairs as possible, then the
    /// smallest total |delta|.
    Optimal,
    /// Repeatedly take the closest remaining pair. Easier to explain but can
    /// leave pairs unmatched that Optimal would pair.
    NearestFirst,
};

inline constexpr int kDefaultMatchThresholdCm = 10;

/// Pairs anomalies of two procedures that share label and segment and lie
/// within `threshold_cm` of each other. Anomalies without a distance pair
/// only with distance-less anomalies of the same group (delta 0).
/// Output order: group (label, segment), then Matched, OnlyLeft, OnlyRight.
/// Throws BadThreshold unless threshold_cm is a non-negative multiple of 5.
[[nodiscard]] std::vector<AnomalyMatch> align_anomalies(const CaseSummary& left, const CaseSummary& right,
                                                        int threshold_cm = kDefaultMatchThresholdCm,
                                                        MatchStrategy strategy = MatchStrategy::Optimal);

}  // namespace scopetrack
