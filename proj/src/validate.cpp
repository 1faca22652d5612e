#include "scopetrack/validate.hpp"

#include "scopetrack/timeline_ops.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace scopetrack {

namespace {

std::string describe(const Annotation& a) {
    std::ostringstream os;
    os << a.label.letter() << "[" << a.interval.start_frame << "," << a.interval.end_frame << ")";
    return os.str();
}

Diagnostic make(Severity sev, DiagnosticCode code, std::string message,
                std::optional<std::string> subject, FrameIndex frame) {
    return Diagnostic{sev, code, std::move(message), std::move(subject), frame};
}

// In-bounds segment annotations sorted by (start, end, id).
std::vector<const Annotation*> sorted_segments(const Timeline& t) {
    std::vector<const Annotation*> out;
    for (const auto& a : t.annotations) {
        if (a.label.is_segment() && a.interval.within(t.video.frame_count)) out.push_back(&a);
    }
    std::sort(out.begin(), out.end(), [](const Annotation* x, const Annotation* y) {
        return std::tie(x->interval.start_frame, x->interval.end_frame, x->annotation_id) <
               std::tie(y->interval.start_frame, y->interval.end_frame, y->annotation_id);
    });
    return out;
}

void check_bounds(const Timeline& t, std::vector<Diagnostic>& out) {
    const FrameIndex n = t.video.frame_count;
    for (const auto& a : t.annotations) {
        if (!a.interval.within(n)) {
            out.push_back(make(Severity::Error, DiagnosticCode::OutOfBounds,
                               describe(a) + " lies outside [0," + std::to_string(n) + ")",
                               a.annotation_id, a.interval.start_frame));
        }
    }
    for (const auto& tag : t.tags) {
        if (tag.frame < 0 || tag.frame >= n) {
            out.push_back(make(Severity::Error, DiagnosticCode::OutOfBounds,
                               "tag frame " + std::to_string(tag.frame) + " outside [0," +
                                   std::to_string(n) + ")",
                               tag.tag_id, tag.frame));
        }
    }
}

void check_tags(const Timeline& t, std::vector<Diagnostic>& out) {
    for (const auto& tag : t.tags) {
        if (tag.is_empty()) {
            out.push_back(make(Severity::Error, DiagnosticCode::EmptyTag,
                               "tag has no distance, findings or impressions", tag.tag_id, tag.frame));
        }
        if (tag.distance_cm && !valid_distance(*tag.distance_cm)) {
            out.push_back(make(Severity::Error, DiagnosticCode::BadDistanceGranularity,
                               "distance " + std::to_string(*tag.distance_cm) +
                                   " cm is not a non-negative multiple of 5",
                               tag.tag_id, tag.frame));
        }
    }
}

void check_overlap(const std::vector<const Annotation*>& segs, std::vector<Diagnostic>& out) {
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            if (segs[j]->interval.start_frame >= segs[i]->interval.end_frame) break;
            out.push_back(make(Severity::Error, DiagnosticCode::SegmentOverlap,
                               describe(*segs[j]) + " overlaps " + describe(*segs[i]),
                               segs[j]->annotation_id, segs[j]->interval.start_frame));
        }
    }
}

void check_coverage(const Timeline& t, const std::vector<const Annotation*>& segs,
                    std::vector<Diagnostic>& out) {
    // Union of segment intervals as disjoint sorted runs.
    std::vector<Interval> cover;
    for (const auto* s : segs) {
        if (!cover.empty() && s->interval.start_frame <= cover.back().end_frame) {
            cover.back().end_frame = std::max(cover.back().end_frame, s->interval.end_frame);
        } else {
            cover.push_back(s->interval);
        }
    }
    for (const auto& a : t.annotations) {
        if (a.label.is_segment() || !a.interval.within(t.video.frame_count)) continue;
        const bool covered = std::any_of(cover.begin(), cover.end(), [&](const Interval& c) {
            return c.start_frame <= a.interval.start_frame && a.interval.end_frame <= c.end_frame;
        });
        if (!covered) {
            out.push_back(make(Severity::Warning, DiagnosticCode::AnomalyOutsideSegment,
                               describe(a) + " is not fully inside annotated segments",
                               a.annotation_id, a.interval.start_frame));
        }
    }
}

void check_order(const std::vector<const Annotation*>& segs, std::vector<Diagnostic>& out) {
    auto cecum = std::find_if(segs.begin(), segs.end(), [](const Annotation* a) {
        return a->label.code() == LabelCode::Cecum;
    });
    // The first cecum closes the insertion run and opens the withdrawal run.
    const std::size_t pivot = cecum == segs.end() ? segs.size() : static_cast<std::size_t>(cecum - segs.begin());
    for (std::size_t i = 1; i < segs.size(); ++i) {
        const int prev = *segs[i - 1]->label.anatomical_index();
        const int cur = *segs[i]->label.anatomical_index();
        const bool insertion = i <= pivot;
        const bool bad = insertion ? cur < prev : cur > prev;
        if (bad) {
            out.push_back(make(Severity::Warning, DiagnosticCode::SegmentOrder,
                               describe(*segs[i]) + " follows " + describe(*segs[i - 1]) +
                                   (insertion ? " during insertion" : " during withdrawal"),
                               segs[i]->annotation_id, segs[i]->interval.start_frame));
        }
    }
}

void check_phase_ratio(const Timeline& t, std::vector<Diagnostic>& out) {
    const auto times = compute_phase_times(t);
    if (!phase_ratio_violated(times)) return;
    const Annotation* c = first_cecum(t);
    std::ostringstream os;
    os << "insertion " << *times.insertion_s << " s is not shorter than withdrawal "
       << *times.withdrawal_s << " s";
    out.push_back(make(Severity::Warning, DiagnosticCode::PhaseRatio, os.str(), c->annotation_id,
                       c->interval.start_frame));
}

}  // namespace

std::vector<Diagnostic> validate_timeline(const Timeline& timeline) {
    std::vector<Diagnostic> out;
    check_bounds(timeline, out);
    check_tags(timeline, out);
    const auto segs = sorted_segments(timeline);
    check_overlap(segs, out);
    check_coverage(timeline, segs, out);
    check_order(segs, out);
    // Phase times are meaningless while the cecum interval itself is broken.
    if (!has_errors(out)) check_phase_ratio(timeline, out);

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.severity, a.frame) < std::tie(b.severity, b.frame);
    });
    return out;
}

void require_valid(const Timeline& timeline) {
    for (const auto& d : validate_timeline(timeline)) {
        if (d.severity == Severity::Error) {
            throw Error(ErrorCode::InvalidTimeline,
                        std::string(to_string(d.code)) + ": " + d.message, d.subject.value_or(""));
        }
    }
}

}  // namespace scopetrack
