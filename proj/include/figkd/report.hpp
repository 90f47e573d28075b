#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace figkd {

// Canonical serialization for report JSON: insertion-ordered keys, two-space
// indent, floats at 9 significant digits, trailing newline. Emit -> parse ->
// emit reproduces the bytes, which is what report determinism rests on.
std::string canonical_json_dump(const nlohmann::ordered_json& j);

// Writes canonical JSON to `path` and returns the rendered plain-text table
// for the report.
std::string emit_report(const nlohmann::ordered_json& report, const std::filesystem::path& path);

// Aligned plain-text rendering; dispatches on report_type
// ("ablation" mirrors the low/high ablation matrix layout, "sweep" lists the
// two 1-D sweeps).
std::string render_report_table(const nlohmann::ordered_json& report);

nlohmann::ordered_json parse_report_file(const std::filesystem::path& path);

}  // namespace figkd
