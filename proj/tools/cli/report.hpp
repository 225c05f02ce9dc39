#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace reebflow::cli {

using Json = nlohmann::json;

enum class Format { json, csv };

Format parse_format(const std::string& name);

/// A header object plus one row per case. A report with neither renders as
/// an empty JSON array.
struct Report {
  Json header = Json::object();
  std::string rows_key = "witnesses";
  std::vector<Json> rows;

  bool empty() const { return header.empty() && rows.empty(); }
};

/// Sorted keys, two-space indent, floats as %.17g, non-finite floats as null.
std::string to_json(const Json& value);
std::string render(const Report& report, Format format);

/// Writes to `path`, or to standard output when path is empty or "-".
/// Throws IoError naming the path on failure.
void emit_report(const Report& report, const std::string& path, Format format);

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Writes text to a file, or to stdout for "" and "-".
void write_text(const std::string& text, const std::string& path);

}  // namespace reebflow::cli
