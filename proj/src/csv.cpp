#include "powershare/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace powershare {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<int> CsvTable::find_column(
    const std::vector<std::string>& names) const {
  for (const auto& name : names) {
    const std::string want = lower(name);
    for (size_t i = 0; i < header.size(); ++i) {
      if (lower(strip(header[i])) == want) return static_cast<int>(i);
    }
  }
  return std::nullopt;
}

int CsvTable::require_column(const std::vector<std::string>& names,
                             const std::string& what) const {
  if (auto idx = find_column(names)) return *idx;
  std::string tried;
  for (const auto& n : names) tried += (tried.empty() ? "" : "/") + n;
  throw SchemaError("missing column for " + what + " (looked for " + tried +
                    ")");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_data = false;
  bool header_done = false;

  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    row_has_data = true;
  };
  auto end_row = [&] {
    if (!row_has_data && row.empty()) return;
    end_field();
    if (!header_done) {
      table.header = row;
      header_done = true;
    } else {
      table.rows.push_back(row);
    }
    row.clear();
    row_has_data = false;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
    } else {
      field += c;
    }
  }
  if (!field.empty() || row_has_data) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_row();
  }
  if (in_quotes) throw SchemaError("unterminated quote in CSV input");
  if (table.header.empty()) throw SchemaError("CSV input has no header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string format_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace powershare
