#pragma once

// Synthetic group x country x period panels. Two data-generating modes:
//   model     — access follows the contest model's sharing gain h(size)
//               through a noisy ordered map onto the 0-2 score range;
//   quadratic — access is the quadratic specification itself, with drawn
//               fixed effects and Gaussian noise.
// Generation is deterministic per seed; countries draw from sub-seeds so a
// parallel implementation could not reorder results.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powershare/panel.hpp"

namespace powershare {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;   // lo == hi pins the parameter
};

enum class DgpMode { Model, Quadratic };

struct SynthConfig {
  int n_countries = 50;
  int groups_min = 1;
  int groups_max = 4;
  int n_periods = 8;
  ParamRange lambda{0.5, 0.5};
  ParamRange a1{0.1, 0.1};
  ParamRange gamma{1.0, 1.0};
  double size_drift = 0.0;        // per-period drift in log-odds
  double size_vol = 0.15;         // log-odds innovation sd
  double size_floor = 1e-4;       // reflection bounds for the share walk
  double size_cap = 1.0 - 1e-4;
  double noise_sigma = 0.5;       // latent shock scale
  double presence_sigma = 0.05;   // exogenous presence_abroad scale (0 = off)
  std::uint64_t seed = 1;
  DgpMode mode = DgpMode::Model;
  // quadratic mode
  double alpha = 1.0;
  double beta1 = 2.0;
  double beta2 = -2.0;
  double fe_country_period_sigma = 0.0;
  double fe_group_sigma = 0.0;

  void validate() const;
};

struct CountryTruth {
  long long country_id = 0;
  double lambda = 0.0, a1 = 0.0, gamma = 0.0;
  std::optional<double> delta_star;   // present when the thresholds exist
};

struct SynthTruth {
  DgpMode mode = DgpMode::Model;
  double alpha = 0.0, beta1 = 0.0, beta2 = 0.0;
  std::vector<CountryTruth> countries;
  std::vector<double> row_h;              // model mode, aligned with rows
  std::vector<double> row_fe;             // quadratic mode: gamma_ct + eta_g
};

struct SynthPanel {
  Panel panel;
  SynthTruth truth;
};

SynthPanel generate(const SynthConfig& config);

struct TruthReport {
  DgpMode mode = DgpMode::Model;
  std::optional<double> true_peak;        // -b1/(2 b2) or common delta*
  double beta1 = 0.0, beta2 = 0.0;
  std::vector<CountryTruth> countries;
};

TruthReport truth_report(const SynthPanel& sp);

std::string truth_to_json(const SynthPanel& sp);

}  // namespace powershare
