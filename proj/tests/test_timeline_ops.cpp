#include "doctest.h"

#include "fixtures.hpp"
#include "scopetrack/timeline_ops.hpp"
#include "scopetrack/validate.hpp"

#include <algorithm>
#include <map>

using namespace scopetrack;

namespace {

Timeline empty_timeline(FrameIndex frames = 27000) {
    return make_timeline("p", VideoMeta::make("v", frames, FrameRate{15, 1}));
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::EmptyInput;
}

}  // namespace

TEST_CASE("add_annotation on an empty timeline") {
    const Timeline t = empty_timeline();
    const auto m = add_annotation(t, Interval{9000, 10500}, Label(LabelCode::Cecum));
    REQUIRE(m.timeline.annotations.size() == 1);
    CHECK(m.timeline.annotations[0].layer() == 0);
    CHECK(m.timeline.annotations[0].annotation_id == m.id);
    CHECK(t.annotations.empty());
}

TEST_CASE("overlapping segments are rejected with the overlapped id") {
    Timeline t = empty_timeline();
    const std::string first = fixtures::annotate(t, 100, 200, 'T');
    try {
        (void)add_annotation(t, Interval{150, 300}, Label(LabelCode::Ascending));
        FAIL("expected SegmentOverlap");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SegmentOverlap);
        CHECK(e.subject() == first);
    }
    // Touching half-open intervals do not overlap.
    CHECK_NOTHROW((void)add_annotation(t, Interval{200, 300}, Label(LabelCode::Ascending)));
}

TEST_CASE("anomalies sit on their own layers inside segments") {
    Timeline t = empty_timeline();
    fixtures::annotate(t, 100, 200, 'T');
    const auto m = add_annotation(t, Interval{150, 160}, Label(LabelCode::Polyp));
    CHECK(m.timeline.find_annotation(m.id)->layer() == 1);
    // Anomalies may overlap each other and segments freely.
    const auto m2 = add_annotation(m.timeline, Interval{150, 160}, Label(LabelCode::Polyp));
    CHECK(m2.timeline.annotations.size() == 3);
}

TEST_CASE("out-of-bounds annotations") {
    const Timeline t = empty_timeline(1000);
    CHECK(code_of([&] { (void)add_annotation(t, Interval{900, 1001}, Label(LabelCode::Rectum)); }) ==
          ErrorCode::OutOfBounds);
    CHECK(code_of([&] { (void)add_annotation(t, Interval{-1, 10}, Label(LabelCode::Polyp)); }) ==
          ErrorCode::OutOfBounds);
    CHECK(code_of([&] { (void)add_annotation(t, Interval{10, 10}, Label(LabelCode::Polyp)); }) ==
          ErrorCode::OutOfBounds);
    CHECK_NOTHROW((void)add_annotation(t, Interval{0, 1000}, Label(LabelCode::Rectum)));
}

TEST_CASE("remove_annotation") {
    const Timeline t = empty_timeline();
    const auto m = add_annotation(t, Interval{0, 10}, Label(LabelCode::Rectum));
    CHECK(remove_annotation(m.timeline, m.id).annotations.empty());
    CHECK(remove_annotation(m.timeline, m.id) == t);
    CHECK(code_of([&] { (void)remove_annotation(m.timeline, "a99"); }) == ErrorCode::UnknownAnnotation);
}

TEST_CASE("ids are not reused after removal of an earlier annotation") {
    Timeline t = empty_timeline();
    const auto a1 = fixtures::annotate(t, 0, 10, 'R');
    const auto a2 = fixtures::annotate(t, 10, 20, 'S');
    t = remove_annotation(t, a1);
    const auto a3 = fixtures::annotate(t, 20, 30, 'D');
    CHECK(a3 != a2);
    CHECK(a3 != a1);
}

TEST_CASE("add_tag classification and errors") {
    const Timeline t = empty_timeline();
    auto m = add_tag(t, 4000, 45, std::nullopt, std::nullopt);
    CHECK(m.timeline.find_tag(m.id)->classification() == TagClass::DistanceMark);
    m = add_tag(t, 4000, 45, std::string("sessile polyp"), std::nullopt);
    CHECK(m.timeline.find_tag(m.id)->classification() == TagClass::FullTag);
    CHECK(code_of([&] { (void)add_tag(t, 4000, 47, std::nullopt, std::nullopt); }) ==
          ErrorCode::BadDistanceGranularity);
    CHECK(code_of([&] { (void)add_tag(t, 4000, std::nullopt, std::nullopt, std::nullopt); }) ==
          ErrorCode::EmptyTag);
    CHECK(code_of([&] { (void)add_tag(t, 4000, std::nullopt, std::string("  "), std::string("")); }) ==
          ErrorCode::EmptyTag);
    CHECK(code_of([&] { (void)add_tag(t, 27000, 45, std::nullopt, std::nullopt); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { (void)add_tag(t, -1, 45, std::nullopt, std::nullopt); }) == ErrorCode::OutOfBounds);
    CHECK(t.tags.empty());
}

TEST_CASE("phase times from the earliest cecum") {
    Timeline t = empty_timeline();
    fixtures::annotate(t, 9000, 10500, 'C');
    const auto p = compute_phase_times(t);
    CHECK(p.complete);
    CHECK(*p.insertion_s == 600.0);
    CHECK(*p.cecum_dwell_s == 100.0);
    CHECK(*p.withdrawal_s == 1100.0);
    CHECK_FALSE(phase_ratio_violated(p));

    // A later re-intubation does not move the split.
    fixtures::annotate(t, 20000, 21000, 'C');
    CHECK(compute_phase_times(t) == p);
}

TEST_CASE("phase times without a cecum are absent") {
    const auto p = compute_phase_times(fixtures::case4());
    CHECK_FALSE(p.complete);
    CHECK_FALSE(p.insertion_s.has_value());
    CHECK_FALSE(p.cecum_dwell_s.has_value());
    CHECK_FALSE(p.withdrawal_s.has_value());
    CHECK_FALSE(phase_ratio_violated(p));
}

TEST_CASE("cecum spanning the whole video") {
    Timeline t = empty_timeline();
    fixtures::annotate(t, 0, 27000, 'C');
    const auto p = compute_phase_times(t);
    CHECK(*p.insertion_s == 0.0);
    CHECK(*p.withdrawal_s == 0.0);
    CHECK(*p.cecum_dwell_s == 1800.0);
    // 0 >= 0: flagged.
    CHECK(phase_ratio_violated(p));
}

TEST_CASE("phase frames conserve the frame count") {
    fixtures::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Timeline t = fixtures::random_complete_timeline(rng, "p");
        const auto f = compute_phase_frames(t);
        REQUIRE(f.has_value());
        CHECK(f->insertion + f->cecum_dwell + f->withdrawal == t.video.frame_count);
    }
}

TEST_CASE("segment_at") {
    Timeline t = empty_timeline();
    fixtures::annotate(t, 100, 200, 'T');
    CHECK(segment_at(t, 150) == Label(LabelCode::Transverse));
    CHECK_FALSE(segment_at(t, 250).has_value());
    fixtures::annotate(t, 0, 100, 'D');
    CHECK(segment_at(t, 100) == Label(LabelCode::Transverse));
    CHECK(segment_at(t, 99) == Label(LabelCode::Descending));
    CHECK(code_of([&] { (void)segment_at(t, 27000); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { (void)segment_at(t, -1); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("layout of an empty timeline has four empty rows") {
    const auto rows = hierarchy_layout(empty_timeline());
    for (int i = 0; i < kLayerCount; ++i) {
        CHECK(rows[i].layer == i);
        CHECK(rows[i].entries.empty());
    }
}

TEST_CASE("layout of case 2") {
    const Timeline t = fixtures::case2();
    const auto rows = hierarchy_layout(t);
    CHECK(rows[0].entries.size() == 11);
    REQUIRE(rows[1].entries.size() == 1);
    CHECK(rows[1].entries[0].label == Label(LabelCode::Polyp));
    CHECK(rows[2].entries.empty());
    CHECK(rows[3].entries.empty());
    for (std::size_t i = 1; i < rows[0].entries.size(); ++i) {
        CHECK(rows[0].entries[i - 1].interval.end_frame <= rows[0].entries[i].interval.start_frame);
    }
}

TEST_CASE("layout is a partition of the annotations") {
    fixtures::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Timeline t = fixtures::random_valid_timeline(rng, "p");
        const auto rows = hierarchy_layout(t);
        std::multimap<std::string, std::pair<int, Interval>> seen;
        for (const auto& row : rows) {
            for (std::size_t k = 0; k < row.entries.size(); ++k) {
                const auto& e = row.entries[k];
                seen.emplace(e.annotation_id, std::pair{row.layer, e.interval});
                if (k > 0) CHECK(row.entries[k - 1].interval.start_frame <= e.interval.start_frame);
            }
        }
        REQUIRE(seen.size() == t.annotations.size());
        for (const auto& a : t.annotations) {
            REQUIRE(seen.count(a.annotation_id) == 1);
            const auto& [layer, interval] = seen.find(a.annotation_id)->second;
            CHECK(layer == a.label.layer());
            CHECK(interval == a.interval);
        }
    }
}

TEST_CASE("layout refuses invalid timelines") {
    Timeline t = empty_timeline();
    fixtures::annotate(t, 0, 100, 'R');
    t.annotations.push_back(Annotation{"x", Interval{50, 150}, Label(LabelCode::Sigmoid), std::nullopt});
    CHECK(code_of([&] { (void)hierarchy_layout(t); }) == ErrorCode::InvalidTimeline);
}

TEST_CASE("mutators never modify their input") {
    fixtures::Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const Timeline t = fixtures::random_valid_timeline(rng, "p");
        const Timeline snapshot = t;
        try {
            (void)add_annotation(t, Interval{0, 1}, Label(LabelCode::Sigmoid));
        } catch (const Error&) {
        }
        (void)add_annotation(t, Interval{0, 1}, Label(LabelCode::Polyp));
        (void)add_tag(t, 0, 5, std::nullopt, std::nullopt);
        if (!t.annotations.empty()) (void)remove_annotation(t, t.annotations.front().annotation_id);
        CHECK(t == snapshot);
    }
}
