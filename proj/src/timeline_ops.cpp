#include "scopetrack/timeline_ops.hpp"

#include "scopetrack/validate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <tuple>

namespace scopetrack {

namespace {

// Next id of the form <prefix><n>, one past the largest n in use. Ids that do
// not follow the pattern (imported data) are ignored.
template <typename Range, typename IdOf>
std::string next_id(char prefix, const Range& items, IdOf id_of) {
    long long max_seen = 0;
    for (const auto& item : items) {
        const std::string& id = id_of(item);
        if (id.size() < 2 || id[0] != prefix) continue;
        long long n = 0;
        auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
        if (ec == std::errc{} && ptr == id.data() + id.size()) max_seen = std::max(max_seen, n);
    }
    return prefix + std::to_string(max_seen + 1);
}

std::optional<std::string> non_blank(std::optional<std::string> s) {
    if (!s) return std::nullopt;
    const bool blank = std::all_of(s->begin(), s->end(),
                                   [](unsigned char c) { return std::isspace(c) != 0; });
    return blank ? std::nullopt : std::move(s);
}

}  // namespace

Mutation add_annotation(const Timeline& timeline, Interval interval, Label label,
                        std::optional<std::string> note) {
    if (!interval.within(timeline.video.frame_count)) {
        throw Error(ErrorCode::OutOfBounds,
                    "interval [" + std::to_string(interval.start_frame) + "," +
                        std::to_string(interval.end_frame) + ") outside video of " +
                        std::to_string(timeline.video.frame_count) + " frames");
    }
    if (label.is_segment()) {
        for (const auto& other : timeline.annotations) {
            if (other.label.is_segment() && other.interval.intersects(interval)) {
                throw Error(ErrorCode::SegmentOverlap,
                            std::string("segment ") + label.letter() + " intersects " +
                                other.label.letter() + " annotation " + other.annotation_id,
                            other.annotation_id);
            }
        }
    }
    Mutation m{timeline, next_id('a', timeline.annotations,
                                 [](const Annotation& a) -> const std::string& { return a.annotation_id; })};
    m.timeline.annotations.push_back(Annotation{m.id, interval, label, std::move(note)});
    return m;
}

Timeline remove_annotation(const Timeline& timeline, std::string_view annotation_id) {
    Timeline out = timeline;
    auto it = std::find_if(out.annotations.begin(), out.annotations.end(),
                           [&](const Annotation& a) { return a.annotation_id == annotation_id; });
    if (it == out.annotations.end()) {
        throw Error(ErrorCode::UnknownAnnotation, "no annotation '" + std::string(annotation_id) + "'",
                    std::string(annotation_id));
    }
    out.annotations.erase(it);
    return out;
}

Mutation add_tag(const Timeline& timeline, FrameIndex frame, std::optional<int> distance_cm,
                 std::optional<std::string> findings, std::optional<std::string> impressions,
                 TagOrigin origin) {
    findings = non_blank(std::move(findings));
    impressions = non_blank(std::move(impressions));
    if (!distance_cm && !findings && !impressions) {
        throw Error(ErrorCode::EmptyTag, "a tag needs a distance, findings or impressions");
    }
    if (distance_cm && !valid_distance(*distance_cm)) {
        throw Error(ErrorCode::BadDistanceGranularity,
                    std::to_string(*distance_cm) + " cm is not a non-negative multiple of 5");
    }
    if (frame < 0 || frame >= timeline.video.frame_count) {
        throw Error(ErrorCode::OutOfBounds, "frame " + std::to_string(frame) + " outside video");
    }
    Mutation m{timeline, next_id('t', timeline.tags, [](const Tag& t) -> const std::string& { return t.tag_id; })};
    m.timeline.tags.push_back(Tag{m.id, frame, distance_cm, std::move(findings), std::move(impressions), origin});
    return m;
}

const Annotation* first_cecum(const Timeline& timeline) noexcept {
    const Annotation* best = nullptr;
    for (const auto& a : timeline.annotations) {
        if (a.label.code() != LabelCode::Cecum) continue;
        if (!best || a.interval.start_frame < best->interval.start_frame) best = &a;
    }
    return best;
}

std::optional<PhaseFrames> compute_phase_frames(const Timeline& timeline) noexcept {
    const Annotation* c = first_cecum(timeline);
    if (!c) return std::nullopt;
    return PhaseFrames{c->interval.start_frame, c->interval.length(),
                       timeline.video.frame_count - c->interval.end_frame};
}

PhaseTimes compute_phase_times(const Timeline& timeline) noexcept {
    const auto frames = compute_phase_frames(timeline);
    if (!frames) return PhaseTimes{};
    const FrameRate fps = timeline.video.fps;
    return PhaseTimes{true, fps.seconds(frames->insertion), fps.seconds(frames->cecum_dwell),
                      fps.seconds(frames->withdrawal)};
}

bool phase_ratio_violated(const PhaseTimes& times) noexcept {
    return times.complete && *times.insertion_s >= *times.withdrawal_s;
}

std::optional<Label> segment_at(const Timeline& timeline, FrameIndex frame) {
    if (frame < 0 || frame >= timeline.video.frame_count) {
        throw Error(ErrorCode::OutOfBounds, "frame " + std::to_string(frame) + " outside video");
    }
    for (const auto& a : timeline.annotations) {
        if (a.label.is_segment() && a.interval.contains(frame)) return a.label;
    }
    return std::nullopt;
}

Layout hierarchy_layout(const Timeline& timeline) {
    require_valid(timeline);
    Layout rows;
    for (int layer = 0; layer < kLayerCount; ++layer) rows[layer].layer = layer;
    for (const auto& a : timeline.annotations) {
        rows[a.layer()].entries.push_back(LayoutEntry{a.interval, a.label, a.annotation_id});
    }
    for (auto& row : rows) {
        std::sort(row.entries.begin(), row.entries.end(), [](const LayoutEntry& x, const LayoutEntry& y) {
            return std::tie(x.interval.start_frame, x.interval.end_frame, x.annotation_id) <
                   std::tie(y.interval.start_frame, y.interval.end_frame, y.annotation_id);
        });
    }
    return rows;
}

}  // namespace scopetrack
