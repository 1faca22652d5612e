#include "scopetrack/transcript.hpp"

#include "scopetrack/timeline_ops.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace scopetrack::transcript {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_decimal(std::string_view s) {
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front()))) return false;
    bool seen_dot = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.') {
            if (seen_dot || i + 1 == s.size()) return false;
            seen_dot = true;
        } else if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

struct Word {
    std::string text;   // as written
    std::string lower;
    bool numeric = false;
};

// Runs of letters or runs of digits; everything else separates. "45cm" splits
// into "45" and "cm", "crohn's" into "crohn" and "s".
std::vector<Word> tokenize(std::string_view text) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        const bool digit = std::isdigit(c) != 0;
        const bool alpha = std::isalpha(c) != 0;
        if (!digit && !alpha) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size()) {
            const auto d = static_cast<unsigned char>(text[j]);
            if (digit ? !std::isdigit(d) : !std::isalpha(d)) break;
            ++j;
        }
        Word w{std::string(text.substr(i, j - i)), {}, digit};
        w.lower = w.text;
        std::transform(w.lower.begin(), w.lower.end(), w.lower.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        words.push_back(std::move(w));
        i = j;
    }
    return words;
}

constexpr std::array<std::string_view, 20> kSmallNumbers = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
};
constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
};

std::optional<int> small_number(const std::string& w) {
    for (std::size_t i = 0; i < kSmallNumbers.size(); ++i) {
        if (kSmallNumbers[i] == w) return static_cast<int>(i);
    }
    return std::nullopt;
}

std::optional<int> tens_number(const std::string& w) {
    for (std::size_t i = 2; i < kTens.size(); ++i) {
        if (kTens[i] == w) return static_cast<int>(i * 10);
    }
    return std::nullopt;
}

// 1..99 from number words at pos.
std::optional<std::pair<int, std::size_t>> below_hundred(const std::vector<std::string>& w, std::size_t pos) {
    if (pos >= w.size()) return std::nullopt;
    if (auto t = tens_number(w[pos])) {
        if (pos + 1 < w.size()) {
            if (auto u = small_number(w[pos + 1]); u && *u >= 1 && *u <= 9) return std::pair{*t + *u, std::size_t{2}};
        }
        return std::pair{*t, std::size_t{1}};
    }
    if (auto s = small_number(w[pos]); s && *s >= 1) return std::pair{*s, std::size_t{1}};
    return std::nullopt;
}

constexpr int kMaxNumberWordValue = 300;

bool is_unit(const std::string& w) {
    return w == "cm" || w == "centimeter" || w == "centimeters" || w == "centimetre" || w == "centimetres";
}

// Words that carry no clinical content of their own; they never push a
// leftover phrase over the FreeFinding threshold.
constexpr std::string_view kFiller[] = {
    "a", "an", "the", "at", "in", "on", "of", "to", "into", "is", "are", "was", "were", "we",
    "i", "now", "and", "colon", "segment", "entering", "enter", "entered", "reached", "reaching",
    "here", "there", "this", "that", "it", "s", "um", "uh", "ok", "okay", "see", "seen", "with",
    "from", "anus", "approximately", "about", "around", "so", "be", "by",
};

bool is_filler(const std::string& w) {
    return std::find(std::begin(kFiller), std::end(kFiller), w) != std::end(kFiller);
}

constexpr std::size_t kFreeFindingMinWords = 3;

std::optional<EventPayload> single_keyword(const std::string& w) {
    if (w == "rectum") return SegmentCall{Label(LabelCode::Rectum)};
    if (w == "sigmoid") return SegmentCall{Label(LabelCode::Sigmoid)};
    if (w == "descending") return SegmentCall{Label(LabelCode::Descending)};
    if (w == "transverse") return SegmentCall{Label(LabelCode::Transverse)};
    if (w == "ascending") return SegmentCall{Label(LabelCode::Ascending)};
    if (w == "cecum") return SegmentCall{Label(LabelCode::Cecum)};
    if (w == "polyp" || w == "polyps") return AnomalyCall{Label(LabelCode::Polyp)};
    if (w == "ibd" || w == "inflammation" || w == "crohn" || w == "crohns") return AnomalyCall{Label(LabelCode::Ibd)};
    if (w == "bleeding" || w == "blood") return AnomalyCall{Label(LabelCode::BloodClot)};
    return std::nullopt;
}

std::optional<Landmark> landmark_phrase(const std::string& first, const std::string& second) {
    if (first == "splenic" && second == "flexure") return Landmark::SplenicFlexure;
    if (first == "hepatic" && second == "flexure") return Landmark::HepaticFlexure;
    if (first == "ileocecal" && second == "valve") return Landmark::IleocecalValve;
    if (first == "appendiceal" && second == "orifice") return Landmark::AppendicealOrifice;
    return std::nullopt;
}

std::string finding_text(const EventPayload& payload) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SegmentCall>) {
                return "segment: " + std::string(p.label.name());
            } else if constexpr (std::is_same_v<T, AnomalyCall>) {
                return std::string(p.label.name());
            } else if constexpr (std::is_same_v<T, LandmarkCall>) {
                return std::string(to_string(p.name));
            } else if constexpr (std::is_same_v<T, FreeFinding>) {
                return p.text;
            } else {
                return {};
            }
        },
        payload);
}

}  // namespace

std::string_view to_string(Landmark l) noexcept {
    switch (l) {
        case Landmark::SplenicFlexure: return "splenic flexure";
        case Landmark::HepaticFlexure: return "hepatic flexure";
        case Landmark::IleocecalValve: return "ileocecal valve";
        case Landmark::AppendicealOrifice: return "appendiceal orifice";
    }
    return "?";
}

ParseResult parse_transcript(std::string_view raw) {
    ParseResult result;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const std::size_t nl = raw.find('\n', pos);
        std::string_view line = raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;
        ++line_number;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;

        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos) {
            result.errors.push_back({line_number, "missing TAB between timestamp and utterance"});
            continue;
        }
        const std::string_view stamp = trim(line.substr(0, tab));
        if (!is_decimal(stamp)) {
            result.errors.push_back({line_number, "timestamp '" + std::string(stamp) + "' is not a decimal number"});
            continue;
        }
        double seconds = 0.0;
        auto [ptr, ec] = std::from_chars(stamp.data(), stamp.data() + stamp.size(), seconds);
        if (ec != std::errc{} || ptr != stamp.data() + stamp.size() || !std::isfinite(seconds)) {
            result.errors.push_back({line_number, "timestamp '" + std::string(stamp) + "' out of range"});
            continue;
        }
        result.lines.push_back({seconds, std::string(trim(line.substr(tab + 1))), line_number});
    }
    std::stable_sort(result.lines.begin(), result.lines.end(),
                     [](const TranscriptLine& a, const TranscriptLine& b) { return a.time_s < b.time_s; });
    return result;
}

namespace {

// Uncapped reading of a number-word phrase; "nine hundred" parses as 900.
std::optional<std::pair<int, std::size_t>> scan_number_words(const std::vector<std::string>& w, std::size_t pos) {
    if (pos >= w.size()) return std::nullopt;
    if (w[pos] == "zero") return std::pair{0, std::size_t{1}};

    std::size_t i = pos;
    int value = 0;
    bool hundreds = false;
    if (w[i] == "hundred") {
        value = 100;
        hundreds = true;
        i += 1;
    } else if (i + 1 < w.size() && w[i + 1] == "hundred") {
        int multiplier = 0;
        if (w[i] == "a") {
            multiplier = 1;
        } else if (auto s = small_number(w[i]); s && *s >= 1 && *s <= 9) {
            multiplier = *s;
        }
        if (multiplier > 0) {
            value = multiplier * 100;
            hundreds = true;
            i += 2;
        }
    }
    if (hundreds) {
        std::size_t j = i;
        if (j < w.size() && w[j] == "and") ++j;
        if (auto rest = below_hundred(w, j)) {
            value += rest->first;
            i = j + rest->second;
        }
    } else if (auto rest = below_hundred(w, i)) {
        value = rest->first;
        i += rest->second;
    } else {
        return std::nullopt;
    }
    return std::pair{value, i - pos};
}

}  // namespace

std::optional<std::pair<int, std::size_t>> parse_number_words(const std::vector<std::string>& w, std::size_t pos) {
    auto n = scan_number_words(w, pos);
    if (n && n->first > kMaxNumberWordValue) return std::nullopt;
    return n;
}

std::vector<UtteranceEvent> interpret_line(const TranscriptLine& line) {
    const std::vector<Word> words = tokenize(line.text);
    std::vector<std::string> lower;
    lower.reserve(words.size());
    for (const auto& w : words) lower.push_back(w.lower);

    std::vector<UtteranceEvent> events;
    std::vector<std::size_t> residual;
    auto emit = [&](EventPayload p) { events.push_back(UtteranceEvent{line.time_s, std::move(p)}); };

    std::size_t i = 0;
    while (i < words.size()) {
        if (i + 1 < words.size()) {
            if (auto lm = landmark_phrase(lower[i], lower[i + 1])) {
                emit(LandmarkCall{*lm});
                i += 2;
                continue;
            }
            if (lower[i] == "blood" && lower[i + 1] == "clot") {
                emit(AnomalyCall{Label(LabelCode::BloodClot)});
                i += 2;
                continue;
            }
        }

        std::optional<std::pair<int, std::size_t>> number;
        if (words[i].numeric) {
            int v = 0;
            const auto& t = words[i].text;
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec == std::errc{} && ptr == t.data() + t.size()) number = std::pair{v, std::size_t{1}};
        } else {
            number = scan_number_words(lower, i);
            if (number && number->first > kMaxNumberWordValue) {
                // Out of range: keep the whole phrase out of the grammar so
                // that its tail is not re-read as a smaller number.
                for (std::size_t k = 0; k < number->second; ++k) residual.push_back(i + k);
                i += number->second;
                continue;
            }
        }
        if (number && i + number->second < words.size() && is_unit(lower[i + number->second])) {
            emit(DistanceCall{number->first});
            i += number->second + 1;
            continue;
        }

        if (auto kw = single_keyword(lower[i])) {
            emit(std::move(*kw));
            ++i;
            continue;
        }
        residual.push_back(i);
        ++i;
    }

    const auto content = std::count_if(residual.begin(), residual.end(),
                                       [&](std::size_t k) { return !is_filler(lower[k]); });
    if (static_cast<std::size_t>(content) >= kFreeFindingMinWords) {
        std::string text;
        for (std::size_t k : residual) {
            if (!text.empty()) text += ' ';
            text += words[k].text;
        }
        emit(FreeFinding{std::move(text)});
    }
    return events;
}

std::vector<UtteranceEvent> interpret_lines(const std::vector<TranscriptLine>& lines) {
    std::vector<UtteranceEvent> out;
    for (const auto& line : lines) {
        auto events = interpret_line(line);
        out.insert(out.end(), std::make_move_iterator(events.begin()), std::make_move_iterator(events.end()));
    }
    return out;
}

FrameIndex frame_at(const VideoMeta& video, double seconds) noexcept {
    const double exact = seconds * static_cast<double>(video.fps.num) / static_cast<double>(video.fps.den);
    const auto frame = static_cast<FrameIndex>(std::floor(exact + 0.5));
    return std::clamp<FrameIndex>(frame, 0, video.frame_count - 1);
}

ApplyResult apply_events(const Timeline& timeline, const std::vector<UtteranceEvent>& events) {
    const double duration = timeline.video.duration_seconds();
    for (const auto& e : events) {
        if (!(e.at_s >= 0.0) || e.at_s > duration) {
            throw Error(ErrorCode::OutOfBounds,
                        "event at " + std::to_string(e.at_s) + " s is outside the " +
                            std::to_string(duration) + " s video");
        }
    }

    ApplyResult result{timeline, {}};
    for (const auto& e : events) {
        const FrameIndex frame = frame_at(timeline.video, e.at_s);
        if (const auto* call = std::get_if<DistanceCall>(&e.payload)) {
            const int snapped = snap5(call->raw_cm);
            auto m = add_tag(result.timeline, frame, snapped, std::nullopt, std::nullopt, TagOrigin::Transcript);
            if (snapped != call->raw_cm) {
                result.diagnostics.push_back(Diagnostic{
                    Severity::Warning, DiagnosticCode::DistanceSnapped,
                    "spoken distance " + std::to_string(call->raw_cm) + " cm snapped to " +
                        std::to_string(snapped) + " cm",
                    m.id, frame});
            }
            result.timeline = std::move(m.timeline);
        } else {
            auto m = add_tag(result.timeline, frame, std::nullopt, finding_text(e.payload), std::nullopt,
                             TagOrigin::Transcript);
            result.timeline = std::move(m.timeline);
        }
    }
    return result;
}

}  // namespace scopetrack::transcript
