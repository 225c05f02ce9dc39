#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace reebflow::cli {

namespace {

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write(std::ostringstream& os, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write(os, it.value(), indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, v[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float:
      os << number(v.get<double>());
      return;
    default:
      os << v.dump();
  }
}

void flatten(const Json& v, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
  } else if (v.is_number_float()) {
    const double d = v.get<double>();
    out[prefix] = std::isfinite(d) ? number(d) : "";
  } else if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      s = q + "\"";
    }
    out[prefix] = s;
  } else if (v.is_null()) {
    out[prefix] = "";
  } else {
    out[prefix] = v.dump();
  }
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  throw std::invalid_argument("unknown format '" + name + "' (expected json or csv)");
}

std::string to_json(const Json& value) {
  std::ostringstream os;
  write(os, value, 0);
  os << "\n";
  return os.str();
}

std::string render(const Report& report, Format format) {
  if (format == Format::json) {
    if (report.empty()) return "[]\n";
    Json doc = report.header;
    Json rows = Json::array();
    for (const auto& r : report.rows) rows.push_back(r);
    doc[report.rows_key] = std::move(rows);
    return to_json(doc);
  }
  std::vector<std::map<std::string, std::string>> flat(report.rows.size());
  std::set<std::string> columns;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    flatten(report.rows[i], "", flat[i]);
    for (const auto& [k, _] : flat[i]) columns.insert(k);
  }
  std::ostringstream os;
  if (columns.empty()) return "";
  bool first = true;
  for (const auto& c : columns) {
    os << (first ? "" : ",") << c;
    first = false;
  }
  os << "\n";
  for (const auto& row : flat) {
    first = true;
    for (const auto& c : columns) {
      auto it = row.find(c);
      os << (first ? "" : ",") << (it == row.end() ? "" : it->second);
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.close();
  if (!file) throw IoError("write to '" + path + "' failed");
}

void emit_report(const Report& report, const std::string& path, Format format) {
  write_text(render(report, format), path);
}

}  // namespace reebflow::cli
