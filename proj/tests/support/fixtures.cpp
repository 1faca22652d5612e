#include "fixtures.hpp"

#include "scopetrack/reporting.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace fixtures {

std::string annotate(Timeline& t, FrameIndex start, FrameIndex end, char label) {
    auto m = add_annotation(t, Interval{start, end}, label_from_code(label));
    t = std::move(m.timeline);
    return m.id;
}

std::string tag(Timeline& t, FrameIndex frame, std::optional<int> distance_cm, std::optional<std::string> findings,
                std::optional<std::string> impressions) {
    auto m = add_tag(t, frame, distance_cm, std::move(findings), std::move(impressions));
    t = std::move(m.timeline);
    return m.id;
}

Timeline segmented_timeline(const std::string& procedure_id) {
    Timeline t = make_timeline(procedure_id, VideoMeta::make(procedure_id + ".mp4", kCaseFrames, kCaseFps));
    // Insertion: quick, with blurry stretches left unannotated.
    annotate(t, 0, 450, 'R');
    annotate(t, 600, 1500, 'S');
    annotate(t, 1800, 2700, 'D');
    annotate(t, 3000, 4200, 'T');
    annotate(t, 4500, 5400, 'A');
    annotate(t, 5400, 7500, 'C');
    // Withdrawal: careful, fully annotated.
    annotate(t, 7500, 10500, 'A');
    annotate(t, 10500, 15000, 'T');
    annotate(t, 15000, 19500, 'D');
    annotate(t, 19500, 23000, 'S');
    annotate(t, 23000, 26500, 'R');
    return t;
}

Timeline case1() {
    Timeline t = segmented_timeline("case-1");
    t.patient_ref = "patient-a";
    annotate(t, 6000, 6300, 'I');
    tag(t, 6100, 165, "inflamed mucosa at the ileocecal valve", "suspected Crohn's disease");
    annotate(t, 8000, 8100, 'P');
    tag(t, 8050, 140, "sessile polyp, 6 mm", "removed by cold snare");
    annotate(t, 12000, 12100, 'P');
    tag(t, 12050, 105, "pedunculated polyp", std::nullopt);
    annotate(t, 17000, 17100, 'P');
    tag(t, 17050, 45, std::nullopt, std::nullopt);
    return t;
}

Timeline case2() {
    Timeline t = segmented_timeline("case-2");
    t.patient_ref = "patient-b";
    annotate(t, 12500, 12600, 'P');
    tag(t, 12550, 100, "flat polyp", std::nullopt);
    return t;
}

Timeline case3() {
    Timeline t = segmented_timeline("case-3");
    t.patient_ref = "patient-c";
    annotate(t, 9000, 9300, 'I');
    tag(t, 9100, 120, "patchy inflammation", std::nullopt);
    annotate(t, 11000, 11300, 'I');
    tag(t, 11100, 105, "ulceration", std::nullopt);
    annotate(t, 14000, 14200, 'P');
    annotate(t, 14100, 14300, 'B');
    tag(t, 14150, 75, "polyp with adherent clot", std::nullopt);
    return t;
}

Timeline case4() {
    Timeline t = make_timeline("case-4", VideoMeta::make("case-4.mp4", 9000, kCaseFps));
    t.patient_ref = "patient-d";
    annotate(t, 0, 1500, 'R');
    annotate(t, 1500, 4000, 'S');
    annotate(t, 4000, 6000, 'D');
    tag(t, 5900, 40, "obstruction; scope could not pass", "refer for surgery");
    return t;
}

Timeline case2_slow_insertion() {
    Timeline t = make_timeline("case-2-slow", VideoMeta::make("case-2-slow.mp4", kCaseFrames, kCaseFps));
    annotate(t, 0, 4000, 'R');
    annotate(t, 4000, 9000, 'S');
    annotate(t, 9000, 13000, 'D');
    annotate(t, 13000, 15000, 'C');
    annotate(t, 15000, 20000, 'T');
    annotate(t, 20000, 27000, 'R');
    return t;
}

// -----------------------------------------------------------------------------

namespace {

template <typename T>
T uniform(Rng& rng, T lo, T hi) {
    return std::uniform_int_distribution<T>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5) {
    return std::bernoulli_distribution(p)(rng);
}

constexpr std::array<const char*, 16> kPieces = {
    "a", "b", "Z", "0", " ", "\"", "\\", "\n", "\t", "\x01", "/", "é", "—", "😀", "cm", "{",
};

constexpr std::array<FrameRate, 5> kRates = {{{15, 1}, {25, 1}, {30000, 1001}, {24, 1}, {60, 1}}};

std::optional<std::string> maybe_text(Rng& rng, double p) {
    if (!coin(rng, p)) return std::nullopt;
    return "x" + random_text(rng);
}

Timeline random_timeline(Rng& rng, const std::string& procedure_id, bool force_cecum) {
    const FrameIndex frames = uniform<FrameIndex>(rng, 40, 60000);
    const FrameRate fps = kRates[uniform<std::size_t>(rng, 0, kRates.size() - 1)];
    Timeline t = make_timeline(procedure_id,
                               VideoMeta::make("v-" + procedure_id, frames, fps,
                                               coin(rng) ? std::optional<std::string>("file:///videos/" + procedure_id)
                                                         : std::nullopt));
    if (coin(rng)) t.patient_ref = random_text(rng);
    if (coin(rng)) {
        t.procedure_date = CalendarDate{uniform(rng, 1990, 2030), static_cast<unsigned>(uniform(rng, 1, 12)),
                                        static_cast<unsigned>(uniform(rng, 1, 28))};
    }

    // Segments: disjoint pieces of a random cut of [0, frames).
    const int cuts = uniform(rng, 0, 10);
    std::vector<FrameIndex> points{0, frames};
    for (int i = 0; i < cuts; ++i) points.push_back(uniform<FrameIndex>(rng, 0, frames));
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    bool has_cecum = false;
    std::vector<std::size_t> usable;
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        if (coin(rng, 0.8)) usable.push_back(k);
    }
    if (usable.empty()) usable.push_back(0);
    for (std::size_t k : usable) {
        const char label = static_cast<char>(kSegmentLabels[uniform<std::size_t>(rng, 0, 5)]);
        has_cecum = has_cecum || label == 'C';
        annotate(t, points[k], points[k + 1], label);
    }
    if (force_cecum && !has_cecum) {
        // Relabel one segment as cecum, keeping its interval.
        auto& a = t.annotations[uniform<std::size_t>(rng, 0, t.annotations.size() - 1)];
        a.label = Label(LabelCode::Cecum);
    }

    // Anomalies anywhere; some blood clots deliberately overlap a polyp.
    const int anomalies = uniform(rng, 0, 12);
    for (int i = 0; i < anomalies; ++i) {
        const FrameIndex start = uniform<FrameIndex>(rng, 0, frames - 1);
        const FrameIndex end = std::min(frames, start + uniform<FrameIndex>(rng, 1, std::max<FrameIndex>(1, frames / 8)));
        const char label = static_cast<char>(kAnomalyLabels[uniform<std::size_t>(rng, 0, 2)]);
        annotate(t, start, end, label);
        if (label == 'P' && coin(rng, 0.4)) {
            const FrameIndex b_start = uniform<FrameIndex>(rng, start, end - 1);
            const FrameIndex b_end = std::min(frames, b_start + uniform<FrameIndex>(rng, 1, end - start + 10));
            annotate(t, b_start, b_end, 'B');
        }
        if (coin(rng, 0.3)) t.annotations.back().note = random_text(rng);
    }

    const int tags = uniform(rng, 0, 15);
    for (int i = 0; i < tags; ++i) {
        std::optional<int> distance;
        if (coin(rng, 0.7)) distance = 5 * uniform(rng, 0, 60);
        auto findings = maybe_text(rng, 0.4);
        auto impressions = maybe_text(rng, 0.3);
        if (!distance && !findings && !impressions) distance = 5 * uniform(rng, 0, 60);
        auto m = add_tag(t, uniform<FrameIndex>(rng, 0, frames - 1), distance, findings, impressions,
                         coin(rng, 0.3) ? TagOrigin::Transcript : TagOrigin::Manual);
        t = std::move(m.timeline);
    }
    return t;
}

}  // namespace

std::string random_text(Rng& rng, std::size_t max_len) {
    const std::size_t n = uniform<std::size_t>(rng, 0, max_len);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += kPieces[uniform<std::size_t>(rng, 0, kPieces.size() - 1)];
    return s;
}

Timeline random_valid_timeline(Rng& rng, const std::string& procedure_id) {
    return random_timeline(rng, procedure_id, false);
}

Timeline random_complete_timeline(Rng& rng, const std::string& procedure_id) {
    return random_timeline(rng, procedure_id, true);
}

ProjectFile random_project(Rng& rng, const std::string& procedure_id) {
    ProjectFile p;
    p.revision = uniform<std::int64_t>(rng, 0, 1'000'000);
    p.saved_at = "2026-10-19T08:30:" + std::to_string(uniform(rng, 10, 59)) + "Z";
    p.timeline = random_valid_timeline(rng, procedure_id);
    const int reports = uniform(rng, 0, 3);
    for (int i = 0; i < reports; ++i) {
        PatientContext ctx;
        if (coin(rng)) ctx["general_information"] = random_text(rng);
        if (coin(rng)) ctx["medications"] = random_text(rng);
        if (coin(rng)) ctx["consent"] = random_text(rng);
        Report r = generate_report(p.timeline, ctx);
        if (coin(rng)) {
            r = set_manual_sections(r, ManualSections{random_text(rng), random_text(rng), random_text(rng),
                                                      "x" + random_text(rng)});
            try {
                r = finalize_report(r);
            } catch (const Error&) {
                // Unlocated findings keep it a draft.
            }
        }
        p.reports.push_back(std::move(r));
    }
    return p;
}

CaseSummary random_summary(Rng& rng, const std::string& procedure_id, int max_per_group) {
    static const std::array<std::optional<Label>, 3> segments = {
        Label(LabelCode::Transverse), Label(LabelCode::Ascending), std::nullopt};
    static const std::array<Label, 2> labels = {Label(LabelCode::Polyp), Label(LabelCode::Ibd)};
    CaseSummary s;
    s.procedure_id = procedure_id;
    int next = 1;
    for (const auto& seg : segments) {
        for (const auto& label : labels) {
            const int n = uniform(rng, 0, max_per_group);
            for (int k = 0; k < n; ++k) {
                AnomalyRecord a;
                a.annotation_id = "a" + std::to_string(next++);
                a.label = label;
                a.segment = seg;
                if (coin(rng, 0.85)) a.distance_cm = 5 * uniform(rng, 18, 26);
                s.anomalies.push_back(std::move(a));
                ++s.counts_by_segment[seg][label];
            }
        }
    }
    std::shuffle(s.anomalies.begin(), s.anomalies.end(), rng);
    return s;
}

}  // namespace fixtures
