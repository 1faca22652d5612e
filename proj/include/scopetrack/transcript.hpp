#pragma once

#include "scopetrack/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace scopetrack::transcript {

/// One timestamped utterance: `<seconds>\t<text>` in the file format.
struct TranscriptLine {
    double time_s = 0.0;
    std::string text;
    /// 1-based line number in the source text.
    std::size_t line_number = 0;

    friend bool operator==(const TranscriptLine&, const TranscriptLine&) = default;
};

struct MalformedLine {
    std::size_t line_number = 0;
    std::string reason;

    friend bool operator==(const MalformedLine&, const MalformedLine&) = default;
};

struct ParseResult {
    std::vector<TranscriptLine> lines;  // sorted by time, stable
    std::vector<MalformedLine> errors;

    friend bool operator==(const ParseResult&, const ParseResult&) = default;
};

/// Blank lines and `#` comments are skipped; malformed lines are collected and
/// parsing continues.
[[nodiscard]] ParseResult parse_transcript(std::string_view raw);

// -----------------------------------------------------------------------------
// Events
// -----------------------------------------------------------------------------

enum class Landmark { SplenicFlexure, HepaticFlexure, IleocecalValve, AppendicealOrifice };

[[nodiscard]] std::string_view to_string(Landmark l) noexcept;

struct DistanceCall {
    int raw_cm = 0;
    friend bool operator==(const DistanceCall&, const DistanceCall&) = default;
};
struct SegmentCall {
    Label label;
    friend bool operator==(const SegmentCall&, const SegmentCall&) = default;
};
struct AnomalyCall {
    Label label;
    friend bool operator==(const AnomalyCall&, const AnomalyCall&) = default;
};
struct LandmarkCall {
    Landmark name = Landmark::SplenicFlexure;
    friend bool operator==(const LandmarkCall&, const LandmarkCall&) = default;
};
struct FreeFinding {
    std::string text;
    friend bool operator==(const FreeFinding&, const FreeFinding&) = default;
};

using EventPayload = std::variant<DistanceCall, SegmentCall, AnomalyCall, LandmarkCall, FreeFinding>;

struct UtteranceEvent {
    double at_s = 0.0;
    EventPayload payload;

    friend bool operator==(const UtteranceEvent&, const UtteranceEvent&) = default;
};

/// Parses "zero" .. "three hundred" (with optional "and"), returning the value
/// and the number of words consumed. Exposed for testing.
[[nodiscard]] std::optional<std::pair<int, std::size_t>> parse_number_words(
    const std::vector<std::string>& words, std::size_t pos);

/// Keyword grammar, applied left to right:
///   G1  <integer | number words> (cm | centimeter | centimeters)  -> DistanceCall
///   G2  rectum sigmoid descending transverse ascending cecum      -> SegmentCall
///   G3  polyp; ibd | inflammation | crohn; bleeding | blood clot | blood -> AnomalyCall
///   G4  splenic flexure, hepatic flexure, ileocecal valve, appendiceal orifice -> LandmarkCall
/// Leftover words become one FreeFinding when at least three of them are not
/// filler words.
[[nodiscard]] std::vector<UtteranceEvent> interpret_line(const TranscriptLine& line);

[[nodiscard]] std::vector<UtteranceEvent> interpret_lines(const std::vector<TranscriptLine>& lines);

/// 5 * round-half-up(d / 5).
[[nodiscard]] constexpr int snap5(int d) noexcept {
    return (d >= 0 ? (d + 2) / 5 : -((-d + 2) / 5)) * 5;
}

/// Round-half-up seconds -> frame, clamped to the last frame.
[[nodiscard]] FrameIndex frame_at(const VideoMeta& video, double seconds) noexcept;

struct ApplyResult {
    Timeline timeline;
    std::vector<Diagnostic> diagnostics;
};

/// Adds one tag per event (origin Transcript). Never adds annotations.
/// Throws OutOfBounds, leaving nothing applied, if any event lies past the
/// end of the video.
[[nodiscard]] ApplyResult apply_events(const Timeline& timeline, const std::vector<UtteranceEvent>& events);

}  // namespace scopetrack::transcript
