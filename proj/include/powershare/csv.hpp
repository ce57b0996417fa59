#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace powershare {

// Missing columns, malformed files, unreadable paths. The CLI maps this to
// exit code 3; validation errors map to exit code 2.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of the first header matching any candidate (case-insensitive).
  std::optional<int> find_column(const std::vector<std::string>& names) const;
  int require_column(const std::vector<std::string>& names,
                     const std::string& what) const;
};

// RFC 4180-ish reader: quoted fields, embedded commas/newlines, CRLF.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::string csv_quote(const std::string& field);

// Floats in emitted CSVs carry 9 significant digits.
std::string format_g9(double x);

}  // namespace powershare
