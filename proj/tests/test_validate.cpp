#include "doctest.h"

#include "fixtures.hpp"
#include "scopetrack/validate.hpp"

#include <algorithm>

using namespace scopetrack;

namespace {

Timeline blank(FrameIndex frames = 1000) {
    return make_timeline("p", VideoMeta::make("v", frames, FrameRate{15, 1}));
}

// Raw insertion that bypasses the mutators, to simulate a hand-edited file.
void raw_annotation(Timeline& t, std::string id, FrameIndex s, FrameIndex e, char label) {
    t.annotations.push_back(Annotation{std::move(id), Interval{s, e}, label_from_code(label), std::nullopt});
}

std::vector<DiagnosticCode> codes(const std::vector<Diagnostic>& ds) {
    std::vector<DiagnosticCode> out;
    for (const auto& d : ds) out.push_back(d.code);
    return out;
}

}  // namespace

TEST_CASE("case fixtures validate cleanly") {
    for (const auto& t : {fixtures::case1(), fixtures::case2(), fixtures::case3(), fixtures::case4()}) {
        CAPTURE(t.procedure_id);
        CHECK(validate_timeline(t).empty());
    }
}

TEST_CASE("slow insertion raises only a PhaseRatio warning") {
    const auto ds = validate_timeline(fixtures::case2_slow_insertion());
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].severity == Severity::Warning);
    CHECK(ds[0].code == DiagnosticCode::PhaseRatio);
    CHECK_FALSE(has_errors(ds));
}

TEST_CASE("overlap in a hand-edited file") {
    Timeline t = blank();
    raw_annotation(t, "a1", 0, 100, 'R');
    raw_annotation(t, "a2", 50, 150, 'S');
    const auto ds = validate_timeline(t);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == DiagnosticCode::SegmentOverlap);
    CHECK(ds[0].severity == Severity::Error);
    CHECK(ds[0].subject == "a2");
    CHECK_THROWS_AS(require_valid(t), Error);
}

TEST_CASE("bounds, granularity and empty tags") {
    Timeline t = blank();
    raw_annotation(t, "a1", 900, 1200, 'P');
    t.tags.push_back(Tag{"t1", 5, 47, std::nullopt, std::nullopt, TagOrigin::Manual});
    t.tags.push_back(Tag{"t2", 6, std::nullopt, std::nullopt, std::nullopt, TagOrigin::Manual});
    t.tags.push_back(Tag{"t3", 1000, 5, std::nullopt, std::nullopt, TagOrigin::Manual});
    const auto ds = validate_timeline(t);
    const auto cs = codes(ds);
    CHECK(std::count(cs.begin(), cs.end(), DiagnosticCode::OutOfBounds) == 2);
    CHECK(std::count(cs.begin(), cs.end(), DiagnosticCode::BadDistanceGranularity) == 1);
    CHECK(std::count(cs.begin(), cs.end(), DiagnosticCode::EmptyTag) == 1);
    CHECK(has_errors(ds));
}

TEST_CASE("anomaly outside segments is a warning") {
    Timeline t = blank();
    fixtures::annotate(t, 0, 100, 'R');
    fixtures::annotate(t, 90, 120, 'P');
    fixtures::annotate(t, 10, 20, 'I');
    const auto ds = validate_timeline(t);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == DiagnosticCode::AnomalyOutsideSegment);
    CHECK(ds[0].severity == Severity::Warning);
}

TEST_CASE("an anomaly spanning two adjacent segments is covered") {
    Timeline t = blank();
    fixtures::annotate(t, 0, 100, 'R');
    fixtures::annotate(t, 100, 200, 'S');
    fixtures::annotate(t, 90, 120, 'P');
    CHECK(validate_timeline(t).empty());
}

TEST_CASE("segment order") {
    SUBCASE("backwards during insertion") {
        Timeline t = blank();
        fixtures::annotate(t, 0, 100, 'S');
        fixtures::annotate(t, 100, 200, 'R');
        const auto ds = validate_timeline(t);
        REQUIRE(ds.size() == 1);
        CHECK(ds[0].code == DiagnosticCode::SegmentOrder);
    }
    SUBCASE("forwards during withdrawal") {
        Timeline t = blank();
        fixtures::annotate(t, 0, 100, 'C');
        fixtures::annotate(t, 100, 200, 'T');
        fixtures::annotate(t, 200, 300, 'A');
        fixtures::annotate(t, 300, 1000, 'R');
        const auto ds = validate_timeline(t);
        REQUIRE(ds.size() == 1);
        CHECK(ds[0].code == DiagnosticCode::SegmentOrder);
        CHECK(ds[0].subject == t.annotations[2].annotation_id);
    }
    SUBCASE("repeated segments are fine") {
        Timeline t = blank();
        fixtures::annotate(t, 0, 100, 'R');
        fixtures::annotate(t, 150, 200, 'R');
        fixtures::annotate(t, 200, 300, 'S');
        CHECK(validate_timeline(t).empty());
    }
}

TEST_CASE("diagnostics are ordered by severity then frame") {
    fixtures::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        Timeline t = fixtures::random_valid_timeline(rng, "p");
        // Break a few things by hand.
        raw_annotation(t, "bad", t.video.frame_count - 1, t.video.frame_count + 5, 'P');
        t.tags.push_back(Tag{"bad-tag", 0, 3, std::nullopt, std::nullopt, TagOrigin::Manual});
        const auto ds = validate_timeline(t);
        CHECK(has_errors(ds));
        for (std::size_t k = 1; k < ds.size(); ++k) {
            const bool ordered = ds[k - 1].severity < ds[k].severity ||
                                 (ds[k - 1].severity == ds[k].severity && ds[k - 1].frame <= ds[k].frame);
            CHECK(ordered);
        }
        CHECK(validate_timeline(t) == ds);
    }
}

TEST_CASE("random valid timelines have no errors") {
    fixtures::Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        CHECK_FALSE(has_errors(validate_timeline(fixtures::random_valid_timeline(rng, "p"))));
    }
}

TEST_CASE("phase ratio is suppressed while errors exist") {
    Timeline t = fixtures::case2_slow_insertion();
    t.tags.push_back(Tag{"t9", 1, 3, std::nullopt, std::nullopt, TagOrigin::Manual});
    const auto cs = codes(validate_timeline(t));
    CHECK(std::find(cs.begin(), cs.end(), DiagnosticCode::PhaseRatio) == cs.end());
}
