#include "scopetrack/store.hpp"

#include "scopetrack/codec.hpp"
#include "scopetrack/validate.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace scopetrack {

using codec::Json;

std::string serialize_project(const ProjectFile& project) {
    Json j = Json::object();
    j["schema_version"] = project.schema_version;
    j["revision"] = project.revision;
    j["saved_at"] = project.saved_at;
    j["timeline"] = codec::timeline_to_json(project.timeline);
    Json reports = Json::array();
    for (const auto& r : project.reports) reports.push_back(codec::report_to_json(r));
    j["reports"] = std::move(reports);
    return j.dump();
}

ProjectFile parse_project_unchecked(std::string_view bytes) {
    const Json j = codec::parse_json(bytes);
    if (!j.is_object()) throw Error(ErrorCode::CorruptFile, "project root must be an object");

    auto version = j.find("schema_version");
    if (version == j.end() || !version->is_number_integer()) {
        throw Error(ErrorCode::CorruptFile, "missing integer schema_version");
    }
    if (version->get<std::int64_t>() != kSchemaVersion) {
        throw Error(ErrorCode::SchemaVersionUnsupported,
                    "schema_version " + std::to_string(version->get<std::int64_t>()) + " (this build reads " +
                        std::to_string(kSchemaVersion) + ")");
    }

    ProjectFile p;
    p.schema_version = kSchemaVersion;
    auto revision = j.find("revision");
    auto saved_at = j.find("saved_at");
    auto timeline = j.find("timeline");
    auto reports = j.find("reports");
    if (revision == j.end() || !revision->is_number_integer() || revision->get<std::int64_t>() < 0) {
        throw Error(ErrorCode::CorruptFile, "missing non-negative integer revision");
    }
    if (saved_at == j.end() || !saved_at->is_string()) throw Error(ErrorCode::CorruptFile, "missing saved_at");
    if (timeline == j.end()) throw Error(ErrorCode::CorruptFile, "missing timeline");
    if (reports == j.end() || !reports->is_array()) throw Error(ErrorCode::CorruptFile, "missing reports array");

    p.revision = revision->get<std::int64_t>();
    p.saved_at = saved_at->get<std::string>();
    p.timeline = codec::timeline_from_json(*timeline);
    for (const auto& r : *reports) p.reports.push_back(codec::report_from_json(r));
    return p;
}

ProjectFile parse_project(std::string_view bytes) {
    ProjectFile p = parse_project_unchecked(bytes);
    require_valid(p.timeline);
    return p;
}

void save_project(const std::filesystem::path& path, ProjectFile& project) {
    require_valid(project.timeline);

    project.schema_version = kSchemaVersion;
    ++project.revision;
    const std::string bytes = serialize_project(project);

    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    auto fail = [&](const std::string& what) {
        --project.revision;
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        return Error(ErrorCode::IoFailure, what + " " + path.string());
    };

    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw fail("cannot open temp file for");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw fail("short write for");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw fail("cannot rename temp file onto");
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    return buf.str();
}

}  // namespace

ProjectFile load_project(const std::filesystem::path& path) {
    return parse_project(read_file(path));
}

ProjectFile load_project_unchecked(const std::filesystem::path& path) {
    return parse_project_unchecked(read_file(path));
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace scopetrack
