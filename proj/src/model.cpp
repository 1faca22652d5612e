#include "scopetrack/model.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace scopetrack {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownLabelCode: return "UnknownLabelCode";
        case ErrorCode::InvalidVideoMeta: return "InvalidVideoMeta";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::SegmentOverlap: return "SegmentOverlap";
        case ErrorCode::UnknownAnnotation: return "UnknownAnnotation";
        case ErrorCode::EmptyTag: return "EmptyTag";
        case ErrorCode::BadDistanceGranularity: return "BadDistanceGranularity";
        case ErrorCode::InvalidTimeline: return "InvalidTimeline";
        case ErrorCode::AlreadyComplete: return "AlreadyComplete";
        case ErrorCode::MissingRecommendation: return "MissingRecommendation";
        case ErrorCode::UnlocatedFinding: return "UnlocatedFinding";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::BadThreshold: return "BadThreshold";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::SchemaVersionUnsupported: return "SchemaVersionUnsupported";
        case ErrorCode::CorruptFile: return "CorruptFile";
        case ErrorCode::BindFailure: return "BindFailure";
        case ErrorCode::RevisionConflict: return "RevisionConflict";
        case ErrorCode::UnknownProcedure: return "UnknownProcedure";
        case ErrorCode::ProcedureExists: return "ProcedureExists";
        case ErrorCode::NoReport: return "NoReport";
    }
    return "Unknown";
}

std::string_view to_string(Severity s) noexcept {
    return s == Severity::Error ? "Error" : "Warning";
}

std::string_view to_string(DiagnosticCode c) noexcept {
    switch (c) {
        case DiagnosticCode::SegmentOverlap: return "SegmentOverlap";
        case DiagnosticCode::OutOfBounds: return "OutOfBounds";
        case DiagnosticCode::BadDistanceGranularity: return "BadDistanceGranularity";
        case DiagnosticCode::EmptyTag: return "EmptyTag";
        case DiagnosticCode::AnomalyOutsideSegment: return "AnomalyOutsideSegment";
        case DiagnosticCode::SegmentOrder: return "SegmentOrder";
        case DiagnosticCode::PhaseRatio: return "PhaseRatio";
        case DiagnosticCode::DistanceSnapped: return "DistanceSnapped";
    }
    return "Unknown";
}

std::string_view to_string(TagOrigin o) noexcept {
    return o == TagOrigin::Manual ? "Manual" : "Transcript";
}

std::string_view to_string(TagClass c) noexcept {
    return c == TagClass::DistanceMark ? "DistanceMark" : "FullTag";
}

VideoMeta VideoMeta::make(std::string video_id, FrameIndex frame_count, FrameRate fps,
                          std::optional<std::string> source_uri) {
    if (frame_count < 1) {
        throw Error(ErrorCode::InvalidVideoMeta, "frame_count must be >= 1");
    }
    if (fps.num <= 0 || fps.den <= 0) {
        throw Error(ErrorCode::InvalidVideoMeta, "fps must be a positive ratio");
    }
    return VideoMeta{std::move(video_id), frame_count, fps, std::move(source_uri)};
}

std::string_view Label::name() const noexcept {
    switch (code_) {
        case LabelCode::Rectum: return "rectum";
        case LabelCode::Sigmoid: return "sigmoid";
        case LabelCode::Descending: return "descending";
        case LabelCode::Transverse: return "transverse";
        case LabelCode::Ascending: return "ascending";
        case LabelCode::Cecum: return "cecum";
        case LabelCode::Polyp: return "polyp";
        case LabelCode::Ibd: return "IBD";
        case LabelCode::BloodClot: return "blood clot";
    }
    return "?";
}

Label label_from_code(char code) {
    for (LabelCode c : kAllLabels) {
        if (static_cast<char>(c) == code) return Label(c);
    }
    throw Error(ErrorCode::UnknownLabelCode, std::string("unknown label code '") + code + "'");
}

FrameIndex Interval::overlap(const Interval& other) const noexcept {
    const FrameIndex lo = std::max(start_frame, other.start_frame);
    const FrameIndex hi = std::min(end_frame, other.end_frame);
    return hi > lo ? hi - lo : 0;
}

CalendarDate CalendarDate::parse(std::string_view text) {
    auto fail = [&] {
        return Error(ErrorCode::InvalidTimeline, "invalid calendar date '" + std::string(text) + "'");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
    auto field = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
        if (ec != std::errc{} || ptr != text.data() + pos + len) throw fail();
        return value;
    };
    CalendarDate d{field(0, 4), static_cast<unsigned>(field(5, 2)), static_cast<unsigned>(field(8, 2))};
    const std::chrono::year_month_day ymd{std::chrono::year{d.year}, std::chrono::month{d.month},
                                          std::chrono::day{d.day}};
    if (!ymd.ok()) throw fail();
    return d;
}

std::string CalendarDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    return buf;
}

const Annotation* Timeline::find_annotation(std::string_view id) const noexcept {
    auto it = std::find_if(annotations.begin(), annotations.end(),
                           [&](const Annotation& a) { return a.annotation_id == id; });
    return it == annotations.end() ? nullptr : &*it;
}

const Tag* Timeline::find_tag(std::string_view id) const noexcept {
    auto it = std::find_if(tags.begin(), tags.end(), [&](const Tag& t) { return t.tag_id == id; });
    return it == tags.end() ? nullptr : &*it;
}

Timeline make_timeline(std::string procedure_id, VideoMeta video) {
    Timeline t;
    t.procedure_id = std::move(procedure_id);
    t.video = std::move(video);
    return t;
}

}  // namespace scopetrack
