#pragma once

// JSON encoding of the domain types. Objects use nlohmann::json's default
// std::map storage, so keys always come out sorted and dump() without an
// indent is the canonical byte form. Absent optionals are omitted.

#include "scopetrack/model.hpp"
#include "scopetrack/reporting.hpp"
#include "scopetrack/timeline_ops.hpp"

#include "json.hpp"

#include <string_view>

namespace scopetrack::codec {

using Json = nlohmann::json;

/// Throws Error{CorruptFile} on malformed or truncated input.
[[nodiscard]] Json parse_json(std::string_view text);

/// `derived` adds read-only fields (annotation layer, tag classification)
/// for API consumers; project files never carry them.
[[nodiscard]] Json timeline_to_json(const Timeline& t, bool derived = false);
[[nodiscard]] Timeline timeline_from_json(const Json& j);

[[nodiscard]] Json annotation_to_json(const Annotation& a, bool derived = false);
[[nodiscard]] Json tag_to_json(const Tag& t, bool derived = false);

[[nodiscard]] Json report_to_json(const Report& r);
[[nodiscard]] Report report_from_json(const Json& j);

[[nodiscard]] Json phase_times_to_json(const PhaseTimes& p);
[[nodiscard]] PhaseTimes phase_times_from_json(const Json& j);

[[nodiscard]] Json diagnostic_to_json(const Diagnostic& d);
[[nodiscard]] Json diagnostics_to_json(const std::vector<Diagnostic>& ds);
[[nodiscard]] Json layout_to_json(const Layout& layout);

}  // namespace scopetrack::codec
