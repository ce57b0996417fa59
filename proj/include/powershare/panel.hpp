#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace powershare {

// One group x country x period row. Missing values (unconstructed lags,
// unattached openness flags) are NaN and serialize as empty fields.
struct PanelRow {
  long long group_id{};
  long long country_id{};
  int period{};                // 1-based period index on the panel grid
  double size{};
  double size_sq{};
  double access{};
  double access_binary{};      // share of years "not excluded" (score > 1)
  double presence_abroad{};
  double lag_size = std::numeric_limits<double>::quiet_NaN();
  double lag_size_sq = std::numeric_limits<double>::quiet_NaN();
  double high_openness = std::numeric_limits<double>::quiet_NaN();
  double high_competitiveness = std::numeric_limits<double>::quiet_NaN();
};

struct Panel {
  std::vector<PanelRow> rows;

  size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  // size_sq consistency, unique (group, country, period) keys.
  void validate() const;

  bool has_openness_flags() const;
  bool has_competitiveness_flags() const;
};

inline bool is_missing(double x) { return std::isnan(x); }

extern const char* const kPanelCsvHeader;

Panel load_panel_csv(const std::string& path);
void write_panel_csv(const Panel& panel, const std::string& path);
std::string panel_to_csv(const Panel& panel);

}  // namespace powershare
