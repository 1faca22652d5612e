#include "scopetrack/reporting.hpp"

#include "scopetrack/codec.hpp"
#include "scopetrack/validate.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <tuple>

namespace scopetrack {

namespace {

FrameIndex frame_gap(const Interval& interval, FrameIndex frame) noexcept {
    if (frame < interval.start_frame) return interval.start_frame - frame;
    if (frame >= interval.end_frame) return frame - (interval.end_frame - 1);
    return 0;
}

// Earlier frame wins ties, then position in the tag list.
const Tag* nearest_distance_tag(const Timeline& t, const Interval& interval) {
    const Tag* best = nullptr;
    FrameIndex best_gap = 0;
    for (const auto& tag : t.tags) {
        if (!tag.distance_cm) continue;
        const FrameIndex gap = frame_gap(interval, tag.frame);
        if (gap > kDistanceWindowFrames) continue;
        if (!best || gap < best_gap || (gap == best_gap && tag.frame < best->frame)) {
            best = &tag;
            best_gap = gap;
        }
    }
    return best;
}

const Tag* first_full_tag_inside(const Timeline& t, const Interval& interval) {
    const Tag* best = nullptr;
    for (const auto& tag : t.tags) {
        if (tag.classification() != TagClass::FullTag || !interval.contains(tag.frame)) continue;
        if (!best || tag.frame < best->frame) best = &tag;
    }
    return best;
}

FindingEntry entry_for(const Timeline& t, const Annotation& a) {
    FindingEntry e;
    e.annotation_id = a.annotation_id;
    e.anomaly_label = a.label;
    e.snapshot_frame = a.interval.start_frame;
    e.segment = segment_at(t, a.interval.start_frame);
    if (const Tag* d = nearest_distance_tag(t, a.interval)) e.distance_cm = d->distance_cm;
    if (const Tag* f = first_full_tag_inside(t, a.interval)) {
        e.findings_text = f->findings;
        e.impressions_text = f->impressions;
    }
    return e;
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string context_value(const PatientContext& ctx, const std::string& key) {
    auto it = ctx.find(key);
    return it == ctx.end() ? std::string{} : it->second;
}

std::string seconds_text(const std::optional<double>& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f s", *s);
    return buf;
}

}  // namespace

std::string_view to_string(CompoundAttribute a) noexcept {
    switch (a) {
        case CompoundAttribute::WithBloodClot: return "WithBloodClot";
    }
    return "?";
}

std::string_view to_string(ReportStatus s) noexcept {
    return s == ReportStatus::Draft ? "Draft" : "Complete";
}

std::vector<FindingEntry> derive_findings(const Timeline& timeline) {
    std::vector<const Annotation*> polyps;
    std::vector<FindingEntry> entries;
    // annotation id -> entry index, for attaching blood clots.
    std::map<std::string, std::size_t> polyp_entry;

    for (const auto& a : timeline.annotations) {
        const auto code = a.label.code();
        if (code != LabelCode::Polyp && code != LabelCode::Ibd) continue;
        if (code == LabelCode::Polyp) {
            polyps.push_back(&a);
            polyp_entry[a.annotation_id] = entries.size();
        }
        entries.push_back(entry_for(timeline, a));
    }

    for (const auto& a : timeline.annotations) {
        if (a.label.code() != LabelCode::BloodClot) continue;
        const Annotation* host = nullptr;
        FrameIndex host_overlap = 0;
        for (const Annotation* p : polyps) {
            const FrameIndex ov = p->interval.overlap(a.interval);
            if (ov == 0) continue;
            const bool better = !host || ov > host_overlap ||
                                (ov == host_overlap &&
                                 std::tie(p->interval.start_frame, p->annotation_id) <
                                     std::tie(host->interval.start_frame, host->annotation_id));
            if (better) {
                host = p;
                host_overlap = ov;
            }
        }
        if (host) {
            auto& e = entries[polyp_entry.at(host->annotation_id)];
            e.compound_attributes.insert(CompoundAttribute::WithBloodClot);
            e.attached_annotation_ids.push_back(a.annotation_id);
        } else {
            entries.push_back(entry_for(timeline, a));
        }
    }

    for (auto& e : entries) std::sort(e.attached_annotation_ids.begin(), e.attached_annotation_ids.end());
    std::sort(entries.begin(), entries.end(), [](const FindingEntry& x, const FindingEntry& y) {
        // Present distances first, larger first.
        const auto key = [](const FindingEntry& e) {
            return std::make_tuple(!e.distance_cm.has_value(), -e.distance_cm.value_or(0), e.snapshot_frame);
        };
        const auto kx = key(x);
        const auto ky = key(y);
        if (kx != ky) return kx < ky;
        return x.annotation_id < y.annotation_id;
    });
    return entries;
}

Report generate_report(const Timeline& timeline, const PatientContext& patient_context) {
    require_valid(timeline);

    Report r;
    r.procedure_id = timeline.procedure_id;
    r.general_information = context_value(patient_context, "general_information");
    r.clinical_history_and_physicals = context_value(patient_context, "clinical_history_and_physicals");
    r.consent = context_value(patient_context, "consent");
    r.medications = context_value(patient_context, "medications");
    r.findings = derive_findings(timeline);

    std::vector<const Tag*> with_impressions;
    for (const auto& tag : timeline.tags) {
        if (tag.impressions) with_impressions.push_back(&tag);
    }
    std::stable_sort(with_impressions.begin(), with_impressions.end(),
                     [](const Tag* a, const Tag* b) { return a->frame < b->frame; });
    for (const Tag* tag : with_impressions) {
        if (!r.impressions.empty()) r.impressions += '\n';
        r.impressions += *tag->impressions;
    }

    r.phase_times = compute_phase_times(timeline);
    r.status = ReportStatus::Draft;
    return r;
}

Report set_manual_sections(const Report& report, ManualSections sections) {
    if (report.status == ReportStatus::Complete) {
        throw Error(ErrorCode::AlreadyComplete, "report for " + report.procedure_id + " is finalized");
    }
    Report out = report;
    out.manual = std::move(sections);
    return out;
}

Report finalize_report(const Report& report) {
    if (report.status == ReportStatus::Complete) {
        throw Error(ErrorCode::AlreadyComplete, "report for " + report.procedure_id + " is finalized");
    }
    if (blank(report.manual.recommendations)) {
        throw Error(ErrorCode::MissingRecommendation, "recommendations must be filled before finalizing");
    }
    for (const auto& f : report.findings) {
        if (!f.segment) {
            throw Error(ErrorCode::UnlocatedFinding,
                        std::string(f.anomaly_label.name()) + " at frame " + std::to_string(f.snapshot_frame) +
                            " lies outside every annotated segment",
                        f.annotation_id);
        }
    }
    Report out = report;
    out.status = ReportStatus::Complete;
    return out;
}

std::string finding_line(const FindingEntry& entry) {
    std::string line(entry.anomaly_label.name());
    line += " — ";
    line += entry.segment ? std::string(entry.segment->name()) : std::string("unlocated");
    line += " — ";
    line += entry.distance_cm ? std::to_string(*entry.distance_cm) : std::string("?");
    line += " cm from anus — frame ";
    line += std::to_string(entry.snapshot_frame);
    if (entry.compound_attributes.count(CompoundAttribute::WithBloodClot) != 0) {
        line += " — with blood clot";
    }
    return line;
}

std::string render_report(const Report& report, RenderFormat format) {
    if (format == RenderFormat::Structured) return codec::report_to_json(report).dump();

    std::string out;
    auto section = [&](std::string_view heading, const std::string& body) {
        out += heading;
        out += '\n';
        if (!body.empty()) {
            out += body;
            if (body.back() != '\n') out += '\n';
        }
        out += '\n';
    };

    out += "Procedure Report: " + report.procedure_id + "\n";
    out += "Status: " + std::string(to_string(report.status)) + "\n\n";

    section("General Information", report.general_information);
    section("Clinical History and Physicals", report.clinical_history_and_physicals);
    section("Consent", report.consent);
    section("Medications", report.medications);

    std::string findings;
    for (const auto& f : report.findings) findings += finding_line(f) + "\n";
    if (report.findings.empty()) findings = "No anomalies annotated.\n";
    section("Findings", findings);

    section("Impressions", report.impressions);
    section("Preparation", report.manual.preparation);

    std::string procedure;
    if (report.phase_times.complete) {
        procedure += "Insertion time: " + seconds_text(report.phase_times.insertion_s) + "\n";
        procedure += "Cecum dwell time: " + seconds_text(report.phase_times.cecum_dwell_s) + "\n";
        procedure += "Withdrawal time: " + seconds_text(report.phase_times.withdrawal_s) + "\n";
    } else {
        procedure += "Cecum not annotated; insertion and withdrawal times not computed.\n";
    }
    procedure += report.manual.procedure_notes;
    section("Procedure", procedure);

    section("Complications", report.manual.complications);
    section("Recommendations", report.manual.recommendations);
    return out;
}

Report parse_structured_report(std::string_view bytes) {
    return codec::report_from_json(codec::parse_json(bytes));
}

}  // namespace scopetrack
