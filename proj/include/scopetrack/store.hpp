#pragma once

#include "scopetrack/model.hpp"
#include "scopetrack/reporting.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scopetrack {

inline constexpr int kSchemaVersion = 1;

/// On-disk state of one procedure.
struct ProjectFile {
    int schema_version = kSchemaVersion;
    std::int64_t revision = 0;
    /// UTC, ISO-8601 ("2026-10-19T08:30:00Z"). Set by the caller.
    std::string saved_at;
    Timeline timeline;
    /// Generated reports, oldest first. The last one is the current report.
    std::vector<Report> reports;

    friend bool operator==(const ProjectFile&, const ProjectFile&) = default;
};

/// Canonical form: sorted keys, no whitespace. Equal projects give equal bytes.
[[nodiscard]] std::string serialize_project(const ProjectFile& project);

/// Parses and fully re-validates. Throws CorruptFile, SchemaVersionUnsupported
/// or InvalidTimeline.
[[nodiscard]] ProjectFile parse_project(std::string_view bytes);

/// Same as parse_project without the final re-validation, so that callers
/// can report diagnostics on a stored timeline that no longer validates.
[[nodiscard]] ProjectFile parse_project_unchecked(std::string_view bytes);

/// Bumps project.revision, then writes a temp file next to `path` and renames
/// it into place. Throws InvalidTimeline (nothing written, revision untouched)
/// or IoFailure (revision restored).
void save_project(const std::filesystem::path& path, ProjectFile& project);

/// Throws IoFailure plus everything parse_project throws.
[[nodiscard]] ProjectFile load_project(const std::filesystem::path& path);

/// Reads without re-validating; see parse_project_unchecked.
[[nodiscard]] ProjectFile load_project_unchecked(const std::filesystem::path& path);

[[nodiscard]] std::string utc_timestamp_now();

}  // namespace scopetrack
