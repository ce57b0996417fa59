#pragma once

// The specification ladder and robustness menu: (1) no FE, (2) country +
// period FE, (3) country x period FE, (4) + group FE, (5) + group trends,
// for contemporaneous, lagged, and IV designs, ordinal or dichotomous
// outcomes, and openness/competitiveness sample splits. Failed cells carry
// their error and the suite continues.

#include <optional>
#include <string>
#include <vector>

#include "powershare/regress.hpp"

namespace powershare {

enum class SampleSplit { None, Openness, Competitiveness };

struct SuiteMenu {
  std::vector<LagMode> lag_modes = {LagMode::Contemporaneous};
  bool dichotomous = false;            // also run the binary-outcome ladder
  bool presence_abroad = false;
  SampleSplit split = SampleSplit::None;
  std::optional<double> max_access;    // pre-restricted panels leave this unset
  bool cluster_correction = false;
  bool wald_f_reference = false;
};

struct SuiteCell {
  std::string column;      // "(3) country x period FE" etc.
  std::string variant;     // "baseline", "lagged", "iv", "binary"
  std::string subset;      // "", "high_openness", "low_openness", ...
  RegressionSpec spec;
  std::optional<FitResult> fit;
  std::string error;
};

struct SuiteResult {
  std::vector<SuiteCell> cells;
};

SuiteResult replicate_suite(const Panel& panel, const SuiteMenu& menu);

// One row per (cell, coefficient) plus peak/test rows.
std::string suite_to_csv(const SuiteResult& suite);

// Full report: coefficient blocks, vcov, tests, peak, FE toggles.
std::string suite_to_json(const SuiteResult& suite);

// Plain-text table in the usual journal layout.
std::string suite_to_text(const SuiteResult& suite);
std::string suite_text_from_json(const std::string& json_text);

// Scatter of (size, access) with the fitted no-FE quadratic overlaid.
struct FigureData {
  std::vector<double> size;
  std::vector<double> access;
  std::vector<double> curve_x;
  std::vector<double> curve_y;
};

FigureData figure_scatter(const Panel& panel, const SuiteResult& suite,
                          const std::string& subset = "");

std::string figure_to_csv(const FigureData& fig);

}  // namespace powershare
