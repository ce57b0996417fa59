#pragma once

// EPR Core / Polity-style CSV ingestion: code the ordinal access index,
// expand year spans to annual rows, aggregate to 10- or 5-year panels with
// the sampling and restriction rules, and attach historical openness and
// competitiveness splits.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "powershare/panel.hpp"

namespace powershare {

struct EprRecord {
  long long group_id{};
  long long country_id{};
  int year_from{};
  int year_to{};
  std::string group_name;
  double size{};
  std::string status;
};

struct PolityRecord {
  long long country_id{};
  int year{};
  std::optional<double> xropen;   // absent when coded missing
  std::optional<double> xrcomp;
};

// Trim, uppercase, collapse internal whitespace.
std::string normalize_status(const std::string& raw);

// Table-1 index: Monopoly 5, Dominance 4, Senior partner 3, Junior partner 2,
// Powerless/Irrelevance/Self-exclusion 1, Discrimination 0.
// Throws on labels outside the closed set.
int code_access(const std::string& status);

bool status_is_irrelevant(const std::string& status);

struct ColumnOverrides {
  std::map<std::string, std::string> map;  // role -> header name
  std::optional<std::string> get(const std::string& role) const {
    auto it = map.find(role);
    if (it == map.end()) return std::nullopt;
    return it->second;
  }
};

struct IngestWarnings {
  int span_outside_range = 0;        // spans beyond 1946-2017
  int unknown_status_dropped = 0;    // rows skipped by drop policy
  int countries_missing_polity = 0;
};

// Roles: group_id, country_id, year_from, year_to, group_name, size, status.
std::vector<EprRecord> read_epr_csv(const std::string& path,
                                    const ColumnOverrides& overrides = {},
                                    bool drop_unknown_status = true,
                                    IngestWarnings* warnings = nullptr);

// Roles: country_id, year, xropen, xrcomp. Negative special codes are
// treated as missing.
std::vector<PolityRecord> read_polity_csv(const std::string& path,
                                          const ColumnOverrides& overrides = {});

struct AnnualRow {
  long long group_id{};
  long long country_id{};
  int year{};
  std::string group_name;
  double size{};
  int access{};
  bool irrelevant = false;
};

// One row per year of each span; overlapping spans for a key are an error
// (spans are inclusive on both ends).
std::vector<AnnualRow> expand_years(const std::vector<EprRecord>& records,
                                    IngestWarnings* warnings = nullptr);

struct PanelBuildOptions {
  int frequency = 10;                    // 10 or 5 year windows
  enum class Aggregation { Mean, FirstObservation };
  Aggregation aggregation = Aggregation::Mean;
  bool restrict_score_leq_2 = false;     // filter on the aggregated index
  bool drop_irrelevant = false;
  bool binary_presence_abroad = false;   // indicator instead of summed size
  double openness_tolerance = 1e-9;      // |mean xropen - 4| <= tol
  int anchor_year = 1945;

  void validate() const;
};

// Windows are [anchor, anchor+freq-1], ... with 1-based period indices; the
// trailing window may be partial. Lags and presence-abroad are computed on
// the full aggregated grid before any restriction filter.
Panel build_panel(const std::vector<AnnualRow>& annual,
                  const PanelBuildOptions& options);

// Historical means since 1800 (or earliest available) through each period's
// last year. high_openness: mean xropen equal to 4 within tolerance;
// high_competitiveness: mean xrcomp above the cross-country median.
void attach_openness(Panel& panel, const std::vector<PolityRecord>& polity,
                     const PanelBuildOptions& options,
                     IngestWarnings* warnings = nullptr);

struct ValidationReport {
  int n_rows = 0;
  int n_groups = 0;
  int n_countries = 0;
  int n_periods = 0;
  double access_mean = 0.0, access_sd = 0.0;
  double size_mean = 0.0, size_sd = 0.0;
  int restricted_rows = 0;
  double restricted_access_mean = 0.0, restricted_access_sd = 0.0;
  double restricted_size_mean = 0.0, restricted_size_sd = 0.0;
  std::vector<std::string> warnings;   // size-sum diagnostics etc.

  std::string to_text() const;
  std::string to_json() const;
};

// Expects the unrestricted panel; restricted statistics use access <= 2.
ValidationReport validate_dataset(const Panel& panel);

}  // namespace powershare
