#include "powershare/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "powershare/csv.hpp"

namespace powershare {

std::string normalize_status(const std::string& raw) {
  std::string out;
  bool pending_space = false;
  for (char ch : raw) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::toupper(c));
  }
  return out;
}

int code_access(const std::string& status) {
  const std::string s = normalize_status(status);
  if (s == "MONOPOLY") return 5;
  if (s == "DOMINANT" || s == "DOMINANCE") return 4;
  if (s == "SENIOR PARTNER") return 3;
  if (s == "JUNIOR PARTNER") return 2;
  if (s == "POWERLESS" || s == "IRRELEVANT" || s == "IRRELEVANCE" ||
      s == "SELF-EXCLUSION" || s == "SELF EXCLUSION" ||
      s == "SEPARATIST AUTONOMY")
    return 1;
  if (s == "DISCRIMINATED" || s == "DISCRIMINATION") return 0;
  throw std::invalid_argument("code_access: unknown status label \"" + status +
                              "\"");
}

bool status_is_irrelevant(const std::string& status) {
  const std::string s = normalize_status(status);
  return s == "IRRELEVANT" || s == "IRRELEVANCE";
}

namespace {

int column_for(const CsvTable& table, const ColumnOverrides& overrides,
               const std::string& role,
               const std::vector<std::string>& candidates) {
  if (auto name = overrides.get(role))
    return table.require_column({*name}, role);
  return table.require_column(candidates, role);
}

double to_double(const std::string& s, const std::string& what) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw SchemaError("cannot parse " + what + " value \"" + s + "\"");
  }
}

long long to_id(const std::string& s, const std::string& what) {
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    throw SchemaError("cannot parse " + what + " value \"" + s + "\"");
  }
}

}  // namespace

std::vector<EprRecord> read_epr_csv(const std::string& path,
                                    const ColumnOverrides& overrides,
                                    bool drop_unknown_status,
                                    IngestWarnings* warnings) {
  const CsvTable table = read_csv(path);
  const int c_gid = column_for(table, overrides, "group_id",
                               {"gwgroupid", "groupid", "group_id"});
  const int c_cid = column_for(table, overrides, "country_id",
                               {"gwid", "country_id", "ccode", "cowcode"});
  const int c_from = column_for(table, overrides, "year_from", {"from", "year_from"});
  const int c_to = column_for(table, overrides, "year_to", {"to", "year_to"});
  const int c_name = column_for(table, overrides, "group_name",
                                {"group", "groupname", "group_name"});
  const int c_size = column_for(table, overrides, "size", {"size", "groupsize"});
  const int c_status = column_for(table, overrides, "status", {"status"});

  std::vector<EprRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    EprRecord r;
    r.group_id = to_id(row.at(c_gid), "group_id");
    r.country_id = to_id(row.at(c_cid), "country_id");
    r.year_from = static_cast<int>(to_id(row.at(c_from), "year_from"));
    r.year_to = static_cast<int>(to_id(row.at(c_to), "year_to"));
    r.group_name = row.at(c_name);
    r.size = to_double(row.at(c_size), "size");
    r.status = row.at(c_status);
    if (r.year_from > r.year_to)
      throw std::invalid_argument("EPR record for group " +
                                  std::to_string(r.group_id) +
                                  ": year_from > year_to");
    if (r.size < 0.0 || r.size > 1.0)
      throw std::invalid_argument("EPR record for group " +
                                  std::to_string(r.group_id) +
                                  ": size outside [0,1]");
    try {
      code_access(r.status);
    } catch (const std::invalid_argument&) {
      // e.g. state-collapse spells in real files
      if (drop_unknown_status) {
        if (warnings) ++warnings->unknown_status_dropped;
        continue;
      }
      throw;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PolityRecord> read_polity_csv(const std::string& path,
                                          const ColumnOverrides& overrides) {
  const CsvTable table = read_csv(path);
  const int c_cid = column_for(table, overrides, "country_id",
                               {"country_id", "ccode", "gwid", "cowcode"});
  const int c_year = column_for(table, overrides, "year", {"year"});
  const int c_open = column_for(table, overrides, "xropen", {"xropen"});
  const int c_comp = column_for(table, overrides, "xrcomp", {"xrcomp"});

  std::vector<PolityRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    PolityRecord r;
    r.country_id = to_id(row.at(c_cid), "country_id");
    r.year = static_cast<int>(to_id(row.at(c_year), "year"));
    auto parse_measure = [&](const std::string& cell, double lo, double hi)
        -> std::optional<double> {
      if (cell.empty()) return std::nullopt;
      const double v = to_double(cell, "polity measure");
      if (v < lo || v > hi) return std::nullopt;  // -66/-77/-88 style codes
      return v;
    };
    r.xropen = parse_measure(row.at(c_open), 0.0, 4.0);
    r.xrcomp = parse_measure(row.at(c_comp), 0.0, 3.0);
    out.push_back(r);
  }
  return out;
}

std::vector<AnnualRow> expand_years(const std::vector<EprRecord>& records,
                                    IngestWarnings* warnings) {
  // Spans per key must not overlap; inclusive bounds, so 1946-1950 and
  // 1950-1955 collide at 1950.
  std::map<std::pair<long long, long long>, std::set<int>> seen;
  std::vector<AnnualRow> out;
  for (const auto& rec : records) {
    if ((rec.year_from < 1946 || rec.year_to > 2017) && warnings)
      ++warnings->span_outside_range;
    const int access = code_access(rec.status);
    const bool irrelevant = status_is_irrelevant(rec.status);
    auto& years = seen[{rec.group_id, rec.country_id}];
    for (int y = rec.year_from; y <= rec.year_to; ++y) {
      if (!years.insert(y).second)
        throw std::invalid_argument(
            "expand_years: overlapping spans for group " +
            std::to_string(rec.group_id) + " at year " + std::to_string(y));
      AnnualRow row;
      row.group_id = rec.group_id;
      row.country_id = rec.country_id;
      row.year = y;
      row.group_name = rec.group_name;
      row.size = rec.size;
      row.access = access;
      row.irrelevant = irrelevant;
      out.push_back(std::move(row));
    }
  }
  return out;
}

void PanelBuildOptions::validate() const {
  if (frequency != 10 && frequency != 5)
    throw std::invalid_argument("PanelBuildOptions: frequency must be 10 or 5");
  if (openness_tolerance < 0.0)
    throw std::invalid_argument("PanelBuildOptions: negative tolerance");
}

namespace {

int period_index(int year, const PanelBuildOptions& opt) {
  const int offset = year - opt.anchor_year;
  return (offset >= 0 ? offset / opt.frequency
                      : -((-offset + opt.frequency - 1) / opt.frequency)) +
         1;
}

int period_last_year(int period, const PanelBuildOptions& opt) {
  return opt.anchor_year + period * opt.frequency - 1;
}

struct Accum {
  long long group_id, country_id;
  int period;
  std::string group_name;
  int first_year = 1 << 30;
  double first_size = 0.0, first_access = 0.0, first_binary = 0.0;
  double sum_size = 0.0, sum_access = 0.0, sum_binary = 0.0;
  int n = 0;
};

}  // namespace

Panel build_panel(const std::vector<AnnualRow>& annual,
                  const PanelBuildOptions& options) {
  options.validate();

  std::map<std::tuple<long long, long long, int>, Accum> cells;
  for (const auto& row : annual) {
    if (options.drop_irrelevant && row.irrelevant) continue;
    const int p = period_index(row.year, options);
    auto& cell = cells[{row.country_id, row.group_id, p}];
    if (cell.n == 0) {
      cell.group_id = row.group_id;
      cell.country_id = row.country_id;
      cell.period = p;
      cell.group_name = row.group_name;
    }
    const double binary = row.access > 1 ? 1.0 : 0.0;
    if (row.year < cell.first_year) {
      cell.first_year = row.year;
      cell.first_size = row.size;
      cell.first_access = row.access;
      cell.first_binary = binary;
    }
    cell.sum_size += row.size;
    cell.sum_access += row.access;
    cell.sum_binary += binary;
    ++cell.n;
  }

  const bool first_obs =
      options.aggregation == PanelBuildOptions::Aggregation::FirstObservation;

  // presence_abroad: summed size of same-named groups elsewhere, same period
  std::map<std::pair<std::string, int>, double> name_period_total;
  for (const auto& [key, cell] : cells) {
    const double size = first_obs ? cell.first_size : cell.sum_size / cell.n;
    name_period_total[{normalize_status(cell.group_name), cell.period}] += size;
  }

  Panel panel;
  std::map<std::tuple<long long, long long, int>, double> size_at;
  for (const auto& [key, cell] : cells) {
    PanelRow r;
    r.group_id = cell.group_id;
    r.country_id = cell.country_id;
    r.period = cell.period;
    r.size = first_obs ? cell.first_size : cell.sum_size / cell.n;
    r.size_sq = r.size * r.size;
    r.access = first_obs ? cell.first_access : cell.sum_access / cell.n;
    r.access_binary = first_obs ? cell.first_binary : cell.sum_binary / cell.n;
    const double abroad =
        name_period_total[{normalize_status(cell.group_name), cell.period}] -
        r.size;
    r.presence_abroad = options.binary_presence_abroad
                            ? (abroad > 1e-12 ? 1.0 : 0.0)
                            : std::max(abroad, 0.0);
    size_at[{cell.group_id, cell.country_id, cell.period}] = r.size;
    panel.rows.push_back(r);
  }

  for (auto& r : panel.rows) {
    auto it = size_at.find({r.group_id, r.country_id, r.period - 1});
    if (it != size_at.end()) {
      r.lag_size = it->second;
      r.lag_size_sq = it->second * it->second;
    }
  }

  if (options.restrict_score_leq_2) {
    std::vector<PanelRow> kept;
    kept.reserve(panel.rows.size());
    for (auto& r : panel.rows)
      if (r.access <= 2.0 + 1e-12) kept.push_back(r);
    panel.rows = std::move(kept);
  }

  std::sort(panel.rows.begin(), panel.rows.end(),
            [](const PanelRow& a, const PanelRow& b) {
              return std::tie(a.country_id, a.group_id, a.period) <
                     std::tie(b.country_id, b.group_id, b.period);
            });
  panel.validate();
  return panel;
}

void attach_openness(Panel& panel, const std::vector<PolityRecord>& polity,
                     const PanelBuildOptions& options,
                     IngestWarnings* warnings) {
  options.validate();
  std::map<long long, std::vector<PolityRecord>> by_country;
  for (const auto& r : polity) by_country[r.country_id].push_back(r);
  for (auto& [cid, recs] : by_country)
    std::sort(recs.begin(), recs.end(),
              [](const PolityRecord& a, const PolityRecord& b) {
                return a.year < b.year;
              });

  // Historical means from the earliest record through the period's end year.
  auto historical_mean = [&](long long country, int last_year, bool open)
      -> std::optional<double> {
    auto it = by_country.find(country);
    if (it == by_country.end()) return std::nullopt;
    double sum = 0.0;
    int n = 0;
    for (const auto& r : it->second) {
      if (r.year > last_year) break;
      const auto& v = open ? r.xropen : r.xrcomp;
      if (v) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };

  std::map<std::pair<long long, int>, std::optional<double>> open_mean,
      comp_mean;
  std::set<long long> missing_countries;
  for (const auto& r : panel.rows) {
    const auto key = std::make_pair(r.country_id, r.period);
    if (open_mean.count(key)) continue;
    const int last = period_last_year(r.period, options);
    open_mean[key] = historical_mean(r.country_id, last, true);
    comp_mean[key] = historical_mean(r.country_id, last, false);
    if (!open_mean[key] && !comp_mean[key])
      missing_countries.insert(r.country_id);
  }
  if (warnings)
    warnings->countries_missing_polity =
        static_cast<int>(missing_countries.size());

  std::vector<double> comp_values;
  for (const auto& [key, v] : comp_mean)
    if (v) comp_values.push_back(*v);
  if (comp_values.empty() &&
      std::all_of(open_mean.begin(), open_mean.end(),
                  [](const auto& kv) { return !kv.second; }))
    throw std::invalid_argument(
        "attach_openness: no polity coverage for any panel country");

  double comp_median = 0.0;
  if (!comp_values.empty()) {
    std::sort(comp_values.begin(), comp_values.end());
    const size_t n = comp_values.size();
    comp_median = n % 2 == 1 ? comp_values[n / 2]
                             : 0.5 * (comp_values[n / 2 - 1] +
                                      comp_values[n / 2]);
  }

  for (auto& r : panel.rows) {
    const auto key = std::make_pair(r.country_id, r.period);
    if (const auto& m = open_mean[key])
      r.high_openness =
          std::fabs(*m - 4.0) <= options.openness_tolerance ? 1.0 : 0.0;
    if (const auto& m = comp_mean[key])
      r.high_competitiveness = *m > comp_median ? 1.0 : 0.0;
  }
}

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace

ValidationReport validate_dataset(const Panel& panel) {
  ValidationReport rep;
  rep.n_rows = static_cast<int>(panel.rows.size());
  std::set<long long> groups, countries;
  std::set<int> periods;
  std::vector<double> access, sizes, r_access, r_sizes;
  std::map<std::pair<long long, int>, double> country_period_size;
  for (const auto& r : panel.rows) {
    groups.insert(r.group_id);
    countries.insert(r.country_id);
    periods.insert(r.period);
    access.push_back(r.access);
    sizes.push_back(r.size);
    if (r.access <= 2.0 + 1e-12) {
      r_access.push_back(r.access);
      r_sizes.push_back(r.size);
    }
    country_period_size[{r.country_id, r.period}] += r.size;
  }
  rep.n_groups = static_cast<int>(groups.size());
  rep.n_countries = static_cast<int>(countries.size());
  rep.n_periods = static_cast<int>(periods.size());
  std::tie(rep.access_mean, rep.access_sd) = mean_sd(access);
  std::tie(rep.size_mean, rep.size_sd) = mean_sd(sizes);
  rep.restricted_rows = static_cast<int>(r_access.size());
  std::tie(rep.restricted_access_mean, rep.restricted_access_sd) =
      mean_sd(r_access);
  std::tie(rep.restricted_size_mean, rep.restricted_size_sd) = mean_sd(r_sizes);
  int oversized = 0;
  for (const auto& [key, total] : country_period_size)
    if (total > 1.0 + 1e-9) ++oversized;
  if (oversized > 0)
    rep.warnings.push_back(std::to_string(oversized) +
                           " country-periods with size sum > 1");
  return rep;
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  out << "panel: " << n_rows << " rows, " << n_groups << " groups, "
      << n_countries << " countries, " << n_periods << " periods\n";
  out << "access (full sample): mean " << format_g9(access_mean) << ", sd "
      << format_g9(access_sd) << "\n";
  out << "size (full sample): mean " << format_g9(size_mean) << ", sd "
      << format_g9(size_sd) << "\n";
  out << "restricted sample (access <= 2): " << restricted_rows << " rows\n";
  out << "  access: mean " << format_g9(restricted_access_mean) << ", sd "
      << format_g9(restricted_access_sd) << "\n";
  out << "  size: mean " << format_g9(restricted_size_mean) << ", sd "
      << format_g9(restricted_size_sd) << "\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string ValidationReport::to_json() const {
  nlohmann::json j{{"n_rows", n_rows},
                   {"n_groups", n_groups},
                   {"n_countries", n_countries},
                   {"n_periods", n_periods},
                   {"access_mean", access_mean},
                   {"access_sd", access_sd},
                   {"size_mean", size_mean},
                   {"size_sd", size_sd},
                   {"restricted_rows", restricted_rows},
                   {"restricted_access_mean", restricted_access_mean},
                   {"restricted_access_sd", restricted_access_sd},
                   {"restricted_size_mean", restricted_size_mean},
                   {"restricted_size_sd", restricted_size_sd},
                   {"warnings", warnings}};
  return j.dump(2);
}

}  // namespace powershare
