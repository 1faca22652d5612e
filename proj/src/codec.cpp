#include "scopetrack/codec.hpp"

#include <limits>

namespace scopetrack::codec {

namespace {

[[noreturn]] void corrupt(const std::string& detail) {
    throw Error(ErrorCode::CorruptFile, detail);
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) corrupt(std::string("expected object around '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) corrupt(std::string("missing key '") + key + "'");
    return *it;
}

const Json* optional_field(const Json& j, const char* key) {
    if (!j.is_object()) corrupt(std::string("expected object around '") + key + "'");
    auto it = j.find(key);
    return (it == j.end() || it->is_null()) ? nullptr : &*it;
}

std::int64_t as_int(const Json& v, const char* what) {
    if (!v.is_number_integer()) corrupt(std::string("'") + what + "' must be an integer");
    return v.get<std::int64_t>();
}

double as_number(const Json& v, const char* what) {
    if (!v.is_number()) corrupt(std::string("'") + what + "' must be a number");
    return v.get<double>();
}

std::string as_string(const Json& v, const char* what) {
    if (!v.is_string()) corrupt(std::string("'") + what + "' must be a string");
    return v.get<std::string>();
}

bool as_bool(const Json& v, const char* what) {
    if (!v.is_boolean()) corrupt(std::string("'") + what + "' must be a boolean");
    return v.get<bool>();
}

const Json& as_array(const Json& v, const char* what) {
    if (!v.is_array()) corrupt(std::string("'") + what + "' must be an array");
    return v;
}

std::int64_t req_int(const Json& j, const char* key) { return as_int(field(j, key), key); }
std::string req_string(const Json& j, const char* key) { return as_string(field(j, key), key); }

std::optional<std::string> opt_string(const Json& j, const char* key) {
    const Json* v = optional_field(j, key);
    return v ? std::optional(as_string(*v, key)) : std::nullopt;
}

std::optional<double> opt_number(const Json& j, const char* key) {
    const Json* v = optional_field(j, key);
    return v ? std::optional(as_number(*v, key)) : std::nullopt;
}

std::optional<int> opt_int(const Json& j, const char* key) {
    const Json* v = optional_field(j, key);
    if (!v) return std::nullopt;
    const auto n = as_int(*v, key);
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
        corrupt(std::string("'") + key + "' out of range");
    }
    return static_cast<int>(n);
}

Label label_field(const Json& j, const char* key) {
    const std::string s = req_string(j, key);
    if (s.size() != 1) corrupt(std::string("'") + key + "' must be a single-letter label");
    try {
        return label_from_code(s[0]);
    } catch (const Error& e) {
        corrupt(e.what());
    }
}

void put_opt(Json& j, const char* key, const std::optional<std::string>& v) {
    if (v) j[key] = *v;
}

template <typename T>
void put_opt_num(Json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

Json finding_to_json(const FindingEntry& f) {
    Json j = Json::object();
    j["annotation_id"] = f.annotation_id;
    j["label"] = std::string(1, f.anomaly_label.letter());
    if (f.segment) j["segment"] = std::string(1, f.segment->letter());
    put_opt_num(j, "distance_cm", f.distance_cm);
    put_opt(j, "findings_text", f.findings_text);
    put_opt(j, "impressions_text", f.impressions_text);
    j["snapshot_frame"] = f.snapshot_frame;
    Json attrs = Json::array();
    for (auto a : f.compound_attributes) attrs.push_back(std::string(to_string(a)));
    j["compound_attributes"] = std::move(attrs);
    j["attached_annotation_ids"] = f.attached_annotation_ids;
    return j;
}

FindingEntry finding_from_json(const Json& j) {
    FindingEntry f;
    f.annotation_id = req_string(j, "annotation_id");
    f.anomaly_label = label_field(j, "label");
    if (f.anomaly_label.is_segment()) corrupt("finding label must be an anomaly");
    if (optional_field(j, "segment")) {
        f.segment = label_field(j, "segment");
        if (!f.segment->is_segment()) corrupt("finding segment must be a segment label");
    }
    f.distance_cm = opt_int(j, "distance_cm");
    f.findings_text = opt_string(j, "findings_text");
    f.impressions_text = opt_string(j, "impressions_text");
    f.snapshot_frame = req_int(j, "snapshot_frame");
    for (const auto& a : as_array(field(j, "compound_attributes"), "compound_attributes")) {
        if (as_string(a, "compound_attributes") != "WithBloodClot") corrupt("unknown compound attribute");
        f.compound_attributes.insert(CompoundAttribute::WithBloodClot);
    }
    for (const auto& id : as_array(field(j, "attached_annotation_ids"), "attached_annotation_ids")) {
        f.attached_annotation_ids.push_back(as_string(id, "attached_annotation_ids"));
    }
    return f;
}

}  // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::exception& e) {
        corrupt(e.what());
    }
}

Json annotation_to_json(const Annotation& a, bool derived) {
    Json j = Json::object();
    j["annotation_id"] = a.annotation_id;
    j["start_frame"] = a.interval.start_frame;
    j["end_frame"] = a.interval.end_frame;
    j["label"] = std::string(1, a.label.letter());
    if (derived) j["layer"] = a.layer();
    put_opt(j, "note", a.note);
    return j;
}

Json tag_to_json(const Tag& t, bool derived) {
    Json j = Json::object();
    j["tag_id"] = t.tag_id;
    j["frame"] = t.frame;
    put_opt_num(j, "distance_cm", t.distance_cm);
    put_opt(j, "findings", t.findings);
    put_opt(j, "impressions", t.impressions);
    j["origin"] = std::string(to_string(t.origin));
    if (derived) j["classification"] = std::string(to_string(t.classification()));
    return j;
}

Json timeline_to_json(const Timeline& t, bool derived) {
    Json video = Json::object();
    video["video_id"] = t.video.video_id;
    video["frame_count"] = t.video.frame_count;
    video["fps"] = Json{{"num", t.video.fps.num}, {"den", t.video.fps.den}};
    put_opt(video, "source_uri", t.video.source_uri);

    Json j = Json::object();
    j["procedure_id"] = t.procedure_id;
    j["video"] = std::move(video);
    Json annotations = Json::array();
    for (const auto& a : t.annotations) annotations.push_back(annotation_to_json(a, derived));
    j["annotations"] = std::move(annotations);
    Json tags = Json::array();
    for (const auto& tag : t.tags) tags.push_back(tag_to_json(tag, derived));
    j["tags"] = std::move(tags);
    put_opt(j, "patient_ref", t.patient_ref);
    if (t.procedure_date) j["procedure_date"] = t.procedure_date->to_string();
    return j;
}

Timeline timeline_from_json(const Json& j) {
    Timeline t;
    t.procedure_id = req_string(j, "procedure_id");

    const Json& video = field(j, "video");
    const Json& fps = field(video, "fps");
    try {
        t.video = VideoMeta::make(req_string(video, "video_id"), req_int(video, "frame_count"),
                                  FrameRate{req_int(fps, "num"), req_int(fps, "den")},
                                  opt_string(video, "source_uri"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptFile) throw;
        corrupt(e.what());
    }

    for (const auto& a : as_array(field(j, "annotations"), "annotations")) {
        Annotation ann;
        ann.annotation_id = req_string(a, "annotation_id");
        ann.interval = Interval{req_int(a, "start_frame"), req_int(a, "end_frame")};
        ann.label = label_field(a, "label");
        ann.note = opt_string(a, "note");
        t.annotations.push_back(std::move(ann));
    }
    for (const auto& tj : as_array(field(j, "tags"), "tags")) {
        Tag tag;
        tag.tag_id = req_string(tj, "tag_id");
        tag.frame = req_int(tj, "frame");
        tag.distance_cm = opt_int(tj, "distance_cm");
        tag.findings = opt_string(tj, "findings");
        tag.impressions = opt_string(tj, "impressions");
        const std::string origin = req_string(tj, "origin");
        if (origin == "Manual") {
            tag.origin = TagOrigin::Manual;
        } else if (origin == "Transcript") {
            tag.origin = TagOrigin::Transcript;
        } else {
            corrupt("unknown tag origin '" + origin + "'");
        }
        t.tags.push_back(std::move(tag));
    }
    t.patient_ref = opt_string(j, "patient_ref");
    if (auto date = opt_string(j, "procedure_date")) {
        try {
            t.procedure_date = CalendarDate::parse(*date);
        } catch (const Error& e) {
            corrupt(e.what());
        }
    }
    return t;
}

Json phase_times_to_json(const PhaseTimes& p) {
    Json j = Json::object();
    j["complete"] = p.complete;
    put_opt_num(j, "insertion_s", p.insertion_s);
    put_opt_num(j, "cecum_dwell_s", p.cecum_dwell_s);
    put_opt_num(j, "withdrawal_s", p.withdrawal_s);
    return j;
}

PhaseTimes phase_times_from_json(const Json& j) {
    PhaseTimes p;
    p.complete = as_bool(field(j, "complete"), "complete");
    p.insertion_s = opt_number(j, "insertion_s");
    p.cecum_dwell_s = opt_number(j, "cecum_dwell_s");
    p.withdrawal_s = opt_number(j, "withdrawal_s");
    const bool all = p.insertion_s && p.cecum_dwell_s && p.withdrawal_s;
    const bool none = !p.insertion_s && !p.cecum_dwell_s && !p.withdrawal_s;
    if (p.complete ? !all : !none) corrupt("phase_times durations must be present iff complete");
    return p;
}

Json report_to_json(const Report& r) {
    Json j = Json::object();
    j["procedure_id"] = r.procedure_id;
    j["status"] = std::string(to_string(r.status));
    j["general_information"] = r.general_information;
    j["clinical_history_and_physicals"] = r.clinical_history_and_physicals;
    j["consent"] = r.consent;
    j["medications"] = r.medications;
    Json findings = Json::array();
    for (const auto& f : r.findings) findings.push_back(finding_to_json(f));
    j["findings"] = std::move(findings);
    j["impressions"] = r.impressions;
    j["preparation"] = r.manual.preparation;
    j["procedure_notes"] = r.manual.procedure_notes;
    j["complications"] = r.manual.complications;
    j["recommendations"] = r.manual.recommendations;
    j["phase_times"] = phase_times_to_json(r.phase_times);
    return j;
}

Report report_from_json(const Json& j) {
    Report r;
    r.procedure_id = req_string(j, "procedure_id");
    const std::string status = req_string(j, "status");
    if (status == "Draft") {
        r.status = ReportStatus::Draft;
    } else if (status == "Complete") {
        r.status = ReportStatus::Complete;
    } else {
        corrupt("unknown report status '" + status + "'");
    }
    r.general_information = req_string(j, "general_information");
    r.clinical_history_and_physicals = req_string(j, "clinical_history_and_physicals");
    r.consent = req_string(j, "consent");
    r.medications = req_string(j, "medications");
    for (const auto& f : as_array(field(j, "findings"), "findings")) r.findings.push_back(finding_from_json(f));
    r.impressions = req_string(j, "impressions");
    r.manual.preparation = req_string(j, "preparation");
    r.manual.procedure_notes = req_string(j, "procedure_notes");
    r.manual.complications = req_string(j, "complications");
    r.manual.recommendations = req_string(j, "recommendations");
    r.phase_times = phase_times_from_json(field(j, "phase_times"));
    return r;
}

Json diagnostic_to_json(const Diagnostic& d) {
    Json j = Json::object();
    j["severity"] = std::string(to_string(d.severity));
    j["code"] = std::string(to_string(d.code));
    j["message"] = d.message;
    j["subject"] = d.subject ? Json(*d.subject) : Json(nullptr);
    j["frame"] = d.frame;
    return j;
}

Json diagnostics_to_json(const std::vector<Diagnostic>& ds) {
    Json out = Json::array();
    for (const auto& d : ds) out.push_back(diagnostic_to_json(d));
    return out;
}

Json layout_to_json(const Layout& layout) {
    Json rows = Json::array();
    for (const auto& row : layout) {
        Json entries = Json::array();
        for (const auto& e : row.entries) {
            entries.push_back(Json{{"annotation_id", e.annotation_id},
                                   {"start_frame", e.interval.start_frame},
                                   {"end_frame", e.interval.end_frame},
                                   {"label", std::string(1, e.label.letter())}});
        }
        rows.push_back(Json{{"layer", row.layer}, {"entries", std::move(entries)}});
    }
    return rows;
}

}  // namespace scopetrack::codec
