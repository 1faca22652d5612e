// scopetrack command-line front end.
//
// Exit codes: 0 ok, 1 validation errors, 2 I/O or file-format errors, 3 usage.

#include "scopetrack/codec.hpp"
#include "scopetrack/comparison.hpp"
#include "scopetrack/reporting.hpp"
#include "scopetrack/service.hpp"
#include "scopetrack/store.hpp"
#include "scopetrack/timeline_ops.hpp"
#include "scopetrack/transcript.hpp"
#include "scopetrack/validate.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace scopetrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 3;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::IoFailure:
        case ErrorCode::CorruptFile:
        case ErrorCode::SchemaVersionUnsupported:
        case ErrorCode::BindFailure:
            return kExitIo;
        default:
            return kExitValidation;
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path);
}

void print_diagnostics(std::ostream& os, const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) {
        os << to_string(d.severity) << ' ' << to_string(d.code);
        os << " @" << d.frame;
        if (d.subject) os << " [" << *d.subject << ']';
        os << ": " << d.message << '\n';
    }
}

Service* g_service = nullptr;

extern "C" void on_signal(int) {
    if (g_service) g_service->stop();
}

int cmd_init(const std::string& path, const std::string& procedure_id, const std::string& video_id,
             FrameIndex frames, const std::string& fps_text, const std::string& source_uri) {
    FrameRate fps{0, 1};
    if (auto slash = fps_text.find('/'); slash != std::string::npos) {
        fps = FrameRate{std::stoll(fps_text.substr(0, slash)), std::stoll(fps_text.substr(slash + 1))};
    } else {
        fps = FrameRate{std::stoll(fps_text), 1};
    }
    ProjectFile project;
    project.timeline = make_timeline(
        procedure_id,
        VideoMeta::make(video_id.empty() ? procedure_id : video_id, frames, fps,
                        source_uri.empty() ? std::nullopt : std::optional<std::string>(source_uri)));
    project.saved_at = utc_timestamp_now();
    save_project(path, project);
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    const ProjectFile project = load_project_unchecked(path);
    const auto ds = validate_timeline(project.timeline);
    print_diagnostics(std::cout, ds);
    if (has_errors(ds)) return kExitValidation;
    std::cout << "ok: " << project.timeline.annotations.size() << " annotations, " << project.timeline.tags.size()
              << " tags\n";
    return kExitOk;
}

int cmd_import_transcript(const std::string& path, const std::string& transcript_path) {
    ProjectFile project = load_project(path);
    const auto parsed = transcript::parse_transcript(read_text(transcript_path));
    for (const auto& m : parsed.errors) {
        std::cerr << transcript_path << ':' << m.line_number << ": skipped: " << m.reason << '\n';
    }
    const auto events = transcript::interpret_lines(parsed.lines);
    auto applied = transcript::apply_events(project.timeline, events);
    print_diagnostics(std::cerr, applied.diagnostics);
    const std::size_t added = applied.timeline.tags.size() - project.timeline.tags.size();
    project.timeline = std::move(applied.timeline);
    project.saved_at = utc_timestamp_now();
    save_project(path, project);
    std::cout << added << " tags added from " << parsed.lines.size() << " lines; revision " << project.revision
              << '\n';
    return kExitOk;
}

int cmd_report(const std::string& path, const std::string& format, const std::string& out,
               const std::string& patient_path, bool fresh) {
    const ProjectFile project = load_project(path);
    Report report;
    if (!fresh && !project.reports.empty()) {
        report = project.reports.back();
    } else {
        PatientContext context;
        if (!patient_path.empty()) {
            const auto j = codec::parse_json(read_text(patient_path));
            if (!j.is_object()) throw Error(ErrorCode::CorruptFile, "patient context must be a JSON object");
            for (const auto& [key, value] : j.items()) {
                if (value.is_string()) context[key] = value.get<std::string>();
            }
        }
        report = generate_report(project.timeline, context);
    }
    const auto fmt = format == "document" ? RenderFormat::Document : RenderFormat::Structured;
    write_text(out, render_report(report, fmt));
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& out) {
    std::vector<CaseSummary> summaries;
    summaries.reserve(paths.size());
    for (const auto& p : paths) summaries.push_back(summarize_case(load_project(p).timeline));
    write_text(out, to_csv(compare_cases(summaries)));
    return kExitOk;
}

int cmd_phase_times(const std::string& path) {
    const ProjectFile project = load_project(path);
    const auto times = compute_phase_times(project.timeline);
    auto j = codec::phase_times_to_json(times);
    j["phase_ratio_warning"] = phase_ratio_violated(times);
    std::cout << j.dump() << '\n';
    return kExitOk;
}

int cmd_serve(const std::string& host, int port, const std::string& data_dir) {
    Service service(ServiceConfig{host, port, data_dir, utc_timestamp_now});
    const int bound = service.bind();
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << host << ':' << bound << " data-dir " << data_dir << std::endl;
    service.run();
    g_service = nullptr;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Colonoscopy timeline annotation, reporting and case comparison"};
    app.require_subcommand(1);

    std::string project_path;
    std::string out_path;

    auto* init = app.add_subcommand("init", "Create an empty project file");
    std::string procedure_id, video_id, fps_text = "15", source_uri;
    FrameIndex frames = 0;
    init->add_option("project", project_path, "Project file to create")->required();
    init->add_option("--procedure-id", procedure_id, "Procedure id")->required();
    init->add_option("--frames", frames, "Video frame count")->required()->check(CLI::PositiveNumber);
    init->add_option("--fps", fps_text, "Frame rate, integer or num/den")->capture_default_str();
    init->add_option("--video-id", video_id, "Video id (defaults to the procedure id)");
    init->add_option("--source-uri", source_uri, "Video location");

    auto* validate = app.add_subcommand("validate", "Print timeline diagnostics");
    validate->add_option("project", project_path)->required();

    auto* import = app.add_subcommand("import-transcript", "Add tags from a timestamped transcript");
    std::string transcript_path;
    import->add_option("project", project_path)->required();
    import->add_option("transcript", transcript_path)->required();

    auto* report = app.add_subcommand("report", "Render the procedure report");
    std::string format = "structured", patient_path;
    bool fresh = false;
    report->add_option("project", project_path)->required();
    report->add_option("--format", format)->check(CLI::IsMember({"structured", "document"}))->capture_default_str();
    report->add_option("--out", out_path, "Output file (stdout when omitted)");
    report->add_option("--patient", patient_path, "JSON object with prior patient information");
    report->add_flag("--fresh", fresh, "Regenerate from the timeline instead of using the stored report");

    auto* compare = app.add_subcommand("compare", "Comparison table as CSV");
    std::vector<std::string> compare_paths;
    compare->add_option("projects", compare_paths)->required();
    compare->add_option("--out", out_path, "Output file (stdout when omitted)");

    auto* phases = app.add_subcommand("phase-times", "Insertion, cecum dwell and withdrawal times");
    phases->add_option("project", project_path)->required();

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    int port = 8080;
    std::string host = "127.0.0.1", data_dir = ".";
    serve->add_option("--port", port)->check(CLI::Range(0, 65535))->capture_default_str();
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--data-dir", data_dir)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*init) return cmd_init(project_path, procedure_id, video_id, frames, fps_text, source_uri);
        if (*validate) return cmd_validate(project_path);
        if (*import) return cmd_import_transcript(project_path, transcript_path);
        if (*report) return cmd_report(project_path, format, out_path, patient_path, fresh);
        if (*compare) return cmd_compare(compare_paths, out_path);
        if (*phases) return cmd_phase_times(project_path);
        if (*serve) return cmd_serve(host, port, data_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad number: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: number out of range: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
