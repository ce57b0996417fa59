#include "powershare/panel.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "powershare/csv.hpp"

namespace powershare {

const char* const kPanelCsvHeader =
    "group_id,country_id,period,size,size_sq,access,access_binary,"
    "presence_abroad,lag_size,lag_size_sq,high_openness,high_competitiveness";

void Panel::validate() const {
  std::set<std::tuple<long long, long long, int>> keys;
  for (const auto& r : rows) {
    if (std::fabs(r.size_sq - r.size * r.size) > 1e-12)
      throw std::invalid_argument("Panel: size_sq != size^2 for group " +
                                  std::to_string(r.group_id));
    if (!keys.emplace(r.group_id, r.country_id, r.period).second)
      throw std::invalid_argument(
          "Panel: duplicate (group, country, period) key for group " +
          std::to_string(r.group_id) + " period " + std::to_string(r.period));
  }
}

bool Panel::has_openness_flags() const {
  for (const auto& r : rows)
    if (!is_missing(r.high_openness)) return true;
  return false;
}

bool Panel::has_competitiveness_flags() const {
  for (const auto& r : rows)
    if (!is_missing(r.high_competitiveness)) return true;
  return false;
}

namespace {

std::string cell(double x) { return is_missing(x) ? "" : format_g9(x); }

double parse_cell(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  return v;
}

}  // namespace

std::string panel_to_csv(const Panel& panel) {
  std::ostringstream out;
  out << kPanelCsvHeader << "\n";
  for (const auto& r : panel.rows) {
    out << r.group_id << ',' << r.country_id << ',' << r.period << ','
        << cell(r.size) << ',' << cell(r.size_sq) << ',' << cell(r.access)
        << ',' << cell(r.access_binary) << ',' << cell(r.presence_abroad)
        << ',' << cell(r.lag_size) << ',' << cell(r.lag_size_sq) << ','
        << cell(r.high_openness) << ',' << cell(r.high_competitiveness)
        << "\n";
  }
  return out.str();
}

void write_panel_csv(const Panel& panel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  out << panel_to_csv(panel);
}

Panel load_panel_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int c_group = table.require_column({"group_id"}, "group_id");
  const int c_country = table.require_column({"country_id"}, "country_id");
  const int c_period = table.require_column({"period"}, "period");
  const int c_size = table.require_column({"size"}, "size");
  const int c_size_sq = table.require_column({"size_sq"}, "size_sq");
  const int c_access = table.require_column({"access"}, "access");
  const int c_binary = table.require_column({"access_binary"}, "access_binary");
  const auto c_presence = table.find_column({"presence_abroad"});
  const auto c_lag = table.find_column({"lag_size"});
  const auto c_lag_sq = table.find_column({"lag_size_sq"});
  const auto c_open = table.find_column({"high_openness"});
  const auto c_comp = table.find_column({"high_competitiveness"});

  Panel panel;
  panel.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto get = [&](int idx) -> const std::string& { return row.at(idx); };
    PanelRow r;
    try {
      r.group_id = std::stoll(get(c_group));
      r.country_id = std::stoll(get(c_country));
      r.period = std::stoi(get(c_period));
      r.size = parse_cell(get(c_size));
      r.size_sq = parse_cell(get(c_size_sq));
      r.access = parse_cell(get(c_access));
      r.access_binary = parse_cell(get(c_binary));
      if (c_presence) r.presence_abroad = parse_cell(get(*c_presence));
      if (c_lag) r.lag_size = parse_cell(get(*c_lag));
      if (c_lag_sq) r.lag_size_sq = parse_cell(get(*c_lag_sq));
      if (c_open) r.high_openness = parse_cell(get(*c_open));
      if (c_comp) r.high_competitiveness = parse_cell(get(*c_comp));
    } catch (const std::exception&) {
      throw SchemaError(path + ": malformed row " +
                        std::to_string(&row - table.rows.data() + 2));
    }
    panel.rows.push_back(r);
  }
  return panel;
}

}  // namespace powershare
