#include "scopetrack/service.hpp"

#include "scopetrack/codec.hpp"
#include "scopetrack/comparison.hpp"
#include "scopetrack/timeline_ops.hpp"
#include "scopetrack/transcript.hpp"
#include "scopetrack/validate.hpp"

#include "httplib.h"

#include <algorithm>
#include <fstream>

namespace scopetrack {

using codec::Json;

// =============================================================================
// ProcedureStore
// =============================================================================

ProcedureStore::ProcedureStore(std::filesystem::path data_dir, Clock clock)
    : data_dir_(std::move(data_dir)), clock_(std::move(clock)) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir_, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create data directory " + data_dir_.string());
}

bool ProcedureStore::valid_id(const std::string& procedure_id) {
    if (procedure_id.empty() || procedure_id.size() > 128 || procedure_id.front() == '.') return false;
    return std::all_of(procedure_id.begin(), procedure_id.end(), [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '_' || c == '-' || c == '.';
    });
}

std::filesystem::path ProcedureStore::path_for(const std::string& procedure_id) const {
    return data_dir_ / (procedure_id + ".json");
}

std::vector<std::string> ProcedureStore::list() const {
    std::vector<std::string> ids;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir_, ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        auto id = entry.path().stem().string();
        if (valid_id(id)) ids.push_back(std::move(id));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

ProcedureStore::Entry& ProcedureStore::entry(const std::string& procedure_id) {
    std::lock_guard lock(entries_guard_);
    auto& slot = entries_[procedure_id];
    if (!slot) slot = std::make_unique<Entry>();
    return *slot;
}

std::shared_ptr<const ProjectFile> ProcedureStore::load_snapshot(const std::string& procedure_id, Entry& e) {
    {
        std::lock_guard lock(e.snapshot_guard);
        if (e.snapshot) return e.snapshot;
    }
    if (!valid_id(procedure_id) || !std::filesystem::exists(path_for(procedure_id))) {
        throw Error(ErrorCode::UnknownProcedure, "no procedure '" + procedure_id + "'");
    }
    auto loaded = std::make_shared<const ProjectFile>(load_project(path_for(procedure_id)));
    std::lock_guard lock(e.snapshot_guard);
    if (!e.snapshot) e.snapshot = std::move(loaded);
    return e.snapshot;
}

std::shared_ptr<const ProjectFile> ProcedureStore::get(const std::string& procedure_id) {
    if (!valid_id(procedure_id)) throw Error(ErrorCode::UnknownProcedure, "no procedure '" + procedure_id + "'");
    return load_snapshot(procedure_id, entry(procedure_id));
}

std::shared_ptr<const ProjectFile> ProcedureStore::create(Timeline timeline) {
    const std::string id = timeline.procedure_id;
    if (!valid_id(id)) throw Error(ErrorCode::InvalidTimeline, "procedure id '" + id + "' is not a valid file name");
    Entry& e = entry(id);
    std::lock_guard write(e.write);
    if (std::filesystem::exists(path_for(id))) {
        throw Error(ErrorCode::ProcedureExists, "procedure '" + id + "' already exists");
    }
    ProjectFile project;
    project.timeline = std::move(timeline);
    project.saved_at = clock_();
    save_project(path_for(id), project);
    auto snap = std::make_shared<const ProjectFile>(std::move(project));
    std::lock_guard lock(e.snapshot_guard);
    e.snapshot = snap;
    return snap;
}

std::shared_ptr<const ProjectFile> ProcedureStore::mutate(const std::string& procedure_id,
                                                          std::optional<std::int64_t> expected_revision,
                                                          const std::function<void(ProjectFile&)>& change) {
    if (!valid_id(procedure_id)) throw Error(ErrorCode::UnknownProcedure, "no procedure '" + procedure_id + "'");
    Entry& e = entry(procedure_id);
    std::lock_guard write(e.write);
    const auto current = load_snapshot(procedure_id, e);
    if (expected_revision && *expected_revision != current->revision) {
        throw Error(ErrorCode::RevisionConflict,
                    "request saw revision " + std::to_string(*expected_revision) + ", stored revision is " +
                        std::to_string(current->revision));
    }
    ProjectFile next = *current;
    change(next);
    next.saved_at = clock_();
    save_project(path_for(procedure_id), next);
    auto snap = std::make_shared<const ProjectFile>(std::move(next));
    std::lock_guard lock(e.snapshot_guard);
    e.snapshot = snap;
    return snap;
}

// =============================================================================
// HTTP
// =============================================================================

namespace {

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownProcedure:
        case ErrorCode::UnknownAnnotation:
        case ErrorCode::NoReport:
            return 404;
        case ErrorCode::SegmentOverlap:
        case ErrorCode::RevisionConflict:
        case ErrorCode::AlreadyComplete:
        case ErrorCode::ProcedureExists:
            return 409;
        case ErrorCode::IoFailure:
        case ErrorCode::SchemaVersionUnsupported:
        case ErrorCode::BindFailure:
            return 500;
        default:
            return 422;
    }
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
    Json body = Json::object();
    body["error"] = std::string(to_string(e.code()));
    body["message"] = e.what();
    body["subject"] = e.subject().empty() ? Json(nullptr) : Json(e.subject());
    send_json(res, status_for(e.code()), body);
}

void send_bad_request(httplib::Response& res, const std::string& message) {
    send_json(res, 400, Json{{"error", "BadRequest"}, {"message", message}, {"subject", nullptr}});
}

// Body of a JSON request; an empty body reads as {}.
Json request_json(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    Json j = codec::parse_json(req.body);
    if (!j.is_object()) throw Error(ErrorCode::CorruptFile, "request body must be a JSON object");
    return j;
}

std::optional<std::int64_t> expected_revision(const httplib::Request& req) {
    if (!req.has_header("If-Match")) return std::nullopt;
    std::string value = req.get_header_value("If-Match");
    value.erase(std::remove(value.begin(), value.end(), '"'), value.end());
    try {
        std::size_t used = 0;
        const auto rev = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return rev;
    } catch (const std::exception&) {
        throw Error(ErrorCode::RevisionConflict, "unparseable If-Match revision '" + value + "'");
    }
}

std::optional<std::string> opt_string_field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(ErrorCode::CorruptFile, std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

std::int64_t int_field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
        throw Error(ErrorCode::CorruptFile, std::string("'") + key + "' must be an integer");
    }
    return it->get<std::int64_t>();
}

Json project_view(const ProjectFile& p) {
    Json reports = Json::array();
    for (const auto& r : p.reports) reports.push_back(codec::report_to_json(r));
    return Json{{"schema_version", p.schema_version},
                {"revision", p.revision},
                {"saved_at", p.saved_at},
                {"timeline", codec::timeline_to_json(p.timeline, true)},
                {"reports", std::move(reports)}};
}

void set_revision(httplib::Response& res, const ProjectFile& p) {
    res.set_header("ETag", "\"" + std::to_string(p.revision) + "\"");
}

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> ids;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        std::string id = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!id.empty()) ids.push_back(std::move(id));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ids;
}

Json row_to_json(const ComparisonRow& row) {
    Json cells = Json::object();
    for (std::size_t k = 0; k < kSegmentLabels.size(); ++k) {
        const auto& c = row.per_segment[k];
        cells[std::string(1, static_cast<char>(kSegmentLabels[k]))] =
            Json{{"P", c.polyp}, {"I", c.ibd}, {"B", c.blood_clot}};
    }
    Json j = Json::object();
    j["case"] = row.procedure_id;
    j["segments"] = std::move(cells);
    j["unlocated"] = row.unlocated;
    j["insertion_s"] = row.insertion_s ? Json(*row.insertion_s) : Json(nullptr);
    j["withdrawal_s"] = row.withdrawal_s ? Json(*row.withdrawal_s) : Json(nullptr);
    j["complete"] = row.complete;
    j["phase_ratio"] = row.phase_ratio;
    return j;
}

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    ProcedureStore store;
    httplib::Server server;

    explicit Impl(ServiceConfig cfg) : config(std::move(cfg)), store(config.data_dir, config.clock) {
        routes();
    }

    // Runs a handler, translating library errors into JSON error responses.
    template <typename F>
    static httplib::Server::Handler guarded(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::CorruptFile) {
                    send_bad_request(res, e.what());
                } else {
                    send_error(res, e);
                }
            }
        };
    }

    void routes() {
        server.Get("/procedures", guarded([this](const httplib::Request&, httplib::Response& res) {
            Json list = Json::array();
            for (const auto& id : store.list()) {
                try {
                    const auto p = store.get(id);
                    list.push_back(Json{{"procedure_id", id},
                                        {"revision", p->revision},
                                        {"patient_ref", p->timeline.patient_ref ? Json(*p->timeline.patient_ref)
                                                                                : Json(nullptr)},
                                        {"complete", compute_phase_times(p->timeline).complete}});
                } catch (const Error& e) {
                    list.push_back(Json{{"procedure_id", id}, {"error", std::string(to_string(e.code()))}});
                }
            }
            send_json(res, 200, list);
        }));

        server.Put(R"(/procedures/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            Json body = request_json(req);
            body["procedure_id"] = req.matches[1].str();
            if (!body.contains("annotations")) body["annotations"] = Json::array();
            if (!body.contains("tags")) body["tags"] = Json::array();
            Timeline t = codec::timeline_from_json(body);
            const auto p = store.create(std::move(t));
            set_revision(res, *p);
            send_json(res, 201, project_view(*p));
        }));

        server.Get(R"(/procedures/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto p = store.get(req.matches[1].str());
            set_revision(res, *p);
            send_json(res, 200, project_view(*p));
        }));

        server.Post(R"(/procedures/([^/]+)/annotations)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = request_json(req);
                        const auto label_text = opt_string_field(body, "label");
                        if (!label_text || label_text->size() != 1) {
                            throw Error(ErrorCode::UnknownLabelCode, "label must be one of R S D T A C P I B");
                        }
                        const Label label = label_from_code((*label_text)[0]);
                        const Interval interval =
                            Interval::from_gesture(int_field(body, "start_frame"), int_field(body, "end_frame"));
                        const auto note = opt_string_field(body, "note");
                        std::string id;
                        const auto p = store.mutate(req.matches[1].str(), expected_revision(req),
                                                    [&](ProjectFile& proj) {
                                                        auto m = add_annotation(proj.timeline, interval, label, note);
                                                        proj.timeline = std::move(m.timeline);
                                                        id = m.id;
                                                    });
                        set_revision(res, *p);
                        Json out = codec::annotation_to_json(*p->timeline.find_annotation(id), true);
                        out["revision"] = p->revision;
                        send_json(res, 201, out);
                    }));

        server.Delete(R"(/procedures/([^/]+)/annotations/([^/]+))",
                      guarded([this](const httplib::Request& req, httplib::Response& res) {
                          const std::string aid = req.matches[2].str();
                          const auto p = store.mutate(req.matches[1].str(), expected_revision(req),
                                                      [&](ProjectFile& proj) {
                                                          proj.timeline = remove_annotation(proj.timeline, aid);
                                                      });
                          set_revision(res, *p);
                          send_json(res, 200, Json{{"removed", aid}, {"revision", p->revision}});
                      }));

        server.Post(R"(/procedures/([^/]+)/tags)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Json body = request_json(req);
            const FrameIndex frame = int_field(body, "frame");
            std::optional<int> distance;
            if (auto it = body.find("distance_cm"); it != body.end() && !it->is_null()) {
                if (!it->is_number_integer()) throw Error(ErrorCode::CorruptFile, "'distance_cm' must be an integer");
                distance = it->get<int>();
            }
            const auto findings = opt_string_field(body, "findings");
            const auto impressions = opt_string_field(body, "impressions");
            std::string id;
            const auto p = store.mutate(req.matches[1].str(), expected_revision(req), [&](ProjectFile& proj) {
                auto m = add_tag(proj.timeline, frame, distance, findings, impressions, TagOrigin::Manual);
                proj.timeline = std::move(m.timeline);
                id = m.id;
            });
            set_revision(res, *p);
            Json out = codec::tag_to_json(*p->timeline.find_tag(id), true);
            out["revision"] = p->revision;
            send_json(res, 201, out);
        }));

        server.Get(R"(/procedures/([^/]+)/diagnostics)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto p = store.get(req.matches[1].str());
                       send_json(res, 200, codec::diagnostics_to_json(validate_timeline(p->timeline)));
                   }));

        server.Get(R"(/procedures/([^/]+)/phase-times)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto p = store.get(req.matches[1].str());
                       const auto times = compute_phase_times(p->timeline);
                       Json out = codec::phase_times_to_json(times);
                       out["phase_ratio_warning"] = phase_ratio_violated(times);
                       send_json(res, 200, out);
                   }));

        server.Get(R"(/procedures/([^/]+)/layout)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto p = store.get(req.matches[1].str());
            send_json(res, 200, codec::layout_to_json(hierarchy_layout(p->timeline)));
        }));

        server.Post(R"(/procedures/([^/]+)/transcript)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const auto parsed = transcript::parse_transcript(req.body);
                        const auto events = transcript::interpret_lines(parsed.lines);
                        std::vector<Diagnostic> diagnostics;
                        std::size_t before = 0;
                        const auto p = store.mutate(req.matches[1].str(), expected_revision(req),
                                                    [&](ProjectFile& proj) {
                                                        before = proj.timeline.tags.size();
                                                        auto applied = transcript::apply_events(proj.timeline, events);
                                                        proj.timeline = std::move(applied.timeline);
                                                        diagnostics = std::move(applied.diagnostics);
                                                    });
                        Json malformed = Json::array();
                        for (const auto& m : parsed.errors) {
                            malformed.push_back(Json{{"line_number", m.line_number}, {"reason", m.reason}});
                        }
                        set_revision(res, *p);
                        send_json(res, 200,
                                  Json{{"tags_added", p->timeline.tags.size() - before},
                                       {"diagnostics", codec::diagnostics_to_json(diagnostics)},
                                       {"malformed_lines", std::move(malformed)},
                                       {"revision", p->revision}});
                    }));

        server.Post(R"(/procedures/([^/]+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Json body = request_json(req);
            PatientContext context;
            for (const auto& [key, value] : body.items()) {
                if (value.is_string()) context[key] = value.get<std::string>();
            }
            Report report;
            const auto p = store.mutate(req.matches[1].str(), expected_revision(req), [&](ProjectFile& proj) {
                report = generate_report(proj.timeline, context);
                proj.reports.push_back(report);
            });
            set_revision(res, *p);
            Json out = codec::report_to_json(report);
            out["revision"] = p->revision;
            send_json(res, 201, out);
        }));

        server.Get(R"(/procedures/([^/]+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto p = store.get(req.matches[1].str());
            if (p->reports.empty()) throw Error(ErrorCode::NoReport, "no report generated yet");
            if (req.get_param_value("format") == "document") {
                res.status = 200;
                res.set_content(render_report(p->reports.back(), RenderFormat::Document), "text/plain; charset=utf-8");
                return;
            }
            set_revision(res, *p);
            send_json(res, 200, codec::report_to_json(p->reports.back()));
        }));

        server.Put(R"(/procedures/([^/]+)/report/manual-sections)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const Json body = request_json(req);
                       ManualSections sections{opt_string_field(body, "preparation").value_or(""),
                                               opt_string_field(body, "procedure_notes").value_or(""),
                                               opt_string_field(body, "complications").value_or(""),
                                               opt_string_field(body, "recommendations").value_or("")};
                       const auto p = store.mutate(req.matches[1].str(), expected_revision(req),
                                                   [&](ProjectFile& proj) {
                                                       if (proj.reports.empty()) {
                                                           throw Error(ErrorCode::NoReport, "generate a report first");
                                                       }
                                                       proj.reports.back() =
                                                           set_manual_sections(proj.reports.back(), sections);
                                                   });
                       set_revision(res, *p);
                       Json out = codec::report_to_json(p->reports.back());
                       out["revision"] = p->revision;
                       send_json(res, 200, out);
                   }));

        server.Post(R"(/procedures/([^/]+)/report/finalize)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const auto p = store.mutate(req.matches[1].str(), expected_revision(req),
                                                    [&](ProjectFile& proj) {
                                                        if (proj.reports.empty()) {
                                                            throw Error(ErrorCode::NoReport, "generate a report first");
                                                        }
                                                        proj.reports.back() = finalize_report(proj.reports.back());
                                                    });
                        set_revision(res, *p);
                        Json out = codec::report_to_json(p->reports.back());
                        out["revision"] = p->revision;
                        send_json(res, 200, out);
                    }));

        server.Get("/compare", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto ids = split_ids(req.get_param_value("ids"));
            std::vector<CaseSummary> summaries;
            for (const auto& id : ids) summaries.push_back(summarize_case(store.get(id)->timeline));
            const auto table = compare_cases(summaries);
            if (req.get_param_value("format") == "csv") {
                res.status = 200;
                res.set_content(to_csv(table), "text/csv; charset=utf-8");
                return;
            }
            Json rows = Json::array();
            for (const auto& row : table.rows) rows.push_back(row_to_json(row));
            send_json(res, 200, Json{{"rows", std::move(rows)}, {"csv", to_csv(table)}});
        }));

        server.Get(R"(/procedures/([^/]+)/video)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto p = store.get(req.matches[1].str());
            const auto& uri = p->timeline.video.source_uri;
            if (!uri) throw Error(ErrorCode::UnknownProcedure, "procedure has no video source");
            std::filesystem::path file = uri->rfind("file://", 0) == 0 ? uri->substr(7) : *uri;
            if (file.is_relative()) file = store.data_dir() / file;
            std::error_code ec;
            const auto size = std::filesystem::file_size(file, ec);
            if (ec) throw Error(ErrorCode::UnknownProcedure, "video source not found: " + file.string());
            auto stream = std::make_shared<std::ifstream>(file, std::ios::binary);
            res.set_content_provider(size, "application/octet-stream",
                                     [stream](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                                         constexpr std::size_t kChunk = 64 * 1024;
                                         char buf[kChunk];
                                         stream->seekg(static_cast<std::streamoff>(offset));
                                         stream->read(buf, static_cast<std::streamsize>(std::min(length, kChunk)));
                                         const auto got = stream->gcount();
                                         if (got <= 0) return false;
                                         return sink.write(buf, static_cast<std::size_t>(got));
                                     });
        }));
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() {
    impl_->server.stop();
}

int Service::bind() {
    const auto& cfg = impl_->config;
    // httplib's default adds SO_REUSEPORT, which lets a second server share
    // the port silently instead of failing to bind.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    int port = cfg.port;
    if (port == 0) {
        port = impl_->server.bind_to_any_port(cfg.host);
        if (port < 0) throw Error(ErrorCode::BindFailure, "cannot bind " + cfg.host);
    } else if (!impl_->server.bind_to_port(cfg.host, port)) {
        throw Error(ErrorCode::BindFailure, "cannot bind " + cfg.host + ":" + std::to_string(port));
    }
    return port;
}

void Service::run() {
    impl_->server.listen_after_bind();
}

void Service::stop() {
    impl_->server.stop();
}

void Service::wait_until_ready() const {
    impl_->server.wait_until_ready();
}

ProcedureStore& Service::store() noexcept {
    return impl_->store;
}

}  // namespace scopetrack
