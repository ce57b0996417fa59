#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here recomputes results from first principles so the checks stay
// independent of the library's own solve paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "powershare/panel.hpp"
#include "powershare/regress.hpp"

namespace testutil {

// Random panel with smooth sizes and a noisy quadratic outcome. Every group
// is observed in every period, and every country holds >= 2 groups, so FE
// cells are never singletons by construction.
inline powershare::Panel random_panel(std::uint64_t seed, int n_countries,
                                      int groups_per_country, int n_periods,
                                      double noise = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.6);
  std::normal_distribution<double> norm(0.0, 1.0);
  powershare::Panel panel;
  for (int c = 1; c <= n_countries; ++c) {
    const double country_fx = norm(rng);
    for (int g = 1; g <= groups_per_country; ++g) {
      const long long gid = c * 1000 + g;
      const double group_fx = norm(rng);
      double size = unif(rng);
      double prev = std::numeric_limits<double>::quiet_NaN();
      for (int t = 1; t <= n_periods; ++t) {
        powershare::PanelRow r;
        r.group_id = gid;
        r.country_id = c;
        r.period = t;
        r.size = std::clamp(size + 0.05 * norm(rng), 0.01, 0.95);
        r.size_sq = r.size * r.size;
        r.presence_abroad = std::fabs(0.1 * norm(rng));
        r.access = 1.0 + 2.0 * r.size - 2.0 * r.size_sq + 0.3 * country_fx +
                   0.3 * group_fx + noise * norm(rng);
        r.access_binary = r.access > 1.0 ? 1.0 : 0.0;
        if (t > 1) {
          r.lag_size = prev;
          r.lag_size_sq = prev * prev;
        }
        prev = r.size;
        size = r.size;
        panel.rows.push_back(r);
      }
    }
  }
  return panel;
}

// Explicit dummy-variable least squares on the same sample rows the design
// used: structural columns first, then full dummy blocks per FE set and
// per-group {1, t} trend columns. Rank-revealing QR drops the redundant
// dummies; the structural coefficients are returned.
inline Eigen::VectorXd dummy_ls_oracle(const powershare::Panel& panel,
                                       const powershare::RegressionSpec& spec,
                                       const std::vector<int>& rows,
                                       const std::vector<std::string>& cols) {
  using powershare::PanelRow;
  const int n = static_cast<int>(rows.size());

  auto value_of = [&](const PanelRow& r, const std::string& name) {
    if (name == "const") return 1.0;
    if (name == "size") return r.size;
    if (name == "size_sq") return r.size_sq;
    if (name == "lag_size") return r.lag_size;
    if (name == "lag_size_sq") return r.lag_size_sq;
    if (name == "presence_abroad") return r.presence_abroad;
    throw std::logic_error("oracle: unknown column " + name);
  };

  std::vector<Eigen::VectorXd> dummies;
  auto add_dummies = [&](auto key_of) {
    std::map<long long, int> levels;
    for (int i : rows) levels.emplace(key_of(panel.rows[i]), 0);
    int next = 0;
    for (auto& [k, v] : levels) v = next++;
    std::vector<Eigen::VectorXd> block(levels.size(),
                                       Eigen::VectorXd::Zero(n));
    for (int i = 0; i < n; ++i)
      block[levels[key_of(panel.rows[rows[i]])]][i] = 1.0;
    for (auto& d : block) dummies.push_back(std::move(d));
    return levels;
  };

  const bool use_country = spec.fe_country && !spec.fe_country_period;
  const bool use_period = spec.fe_period && !spec.fe_country_period;
  if (use_country)
    add_dummies([](const PanelRow& r) { return r.country_id; });
  if (use_period)
    add_dummies([](const PanelRow& r) { return (long long)r.period; });
  if (spec.fe_country_period)
    add_dummies([](const PanelRow& r) {
      return r.country_id * 100000 + r.period;
    });
  auto group_key = [](const PanelRow& r) {
    return r.group_id * 100003 + r.country_id;
  };
  if (spec.fe_group || spec.group_trends) {
    auto levels = add_dummies(group_key);
    if (spec.group_trends) {
      std::vector<Eigen::VectorXd> tcols(levels.size(),
                                         Eigen::VectorXd::Zero(n));
      for (int i = 0; i < n; ++i) {
        const PanelRow& r = panel.rows[rows[i]];
        tcols[levels[group_key(r)]][i] = r.period;
      }
      for (auto& d : tcols) dummies.push_back(std::move(d));
    }
  }

  const int k_struct = static_cast<int>(cols.size());
  Eigen::MatrixXd W(n, k_struct + static_cast<int>(dummies.size()));
  Eigen::VectorXd y(n);
  const double PanelRow::*ycol =
      spec.outcome == powershare::OutcomeVar::AccessBinary
          ? &PanelRow::access_binary
          : &PanelRow::access;
  for (int i = 0; i < n; ++i) {
    const PanelRow& r = panel.rows[rows[i]];
    y[i] = r.*ycol;
    for (int j = 0; j < k_struct; ++j) W(i, j) = value_of(r, cols[j]);
  }
  for (size_t j = 0; j < dummies.size(); ++j)
    W.col(k_struct + static_cast<int>(j)) = dummies[j];

  const Eigen::VectorXd full =
      W.colPivHouseholderQr().solve(y);
  return full.head(k_struct);
}

// Brute-force CR0 sandwich recomputed from per-observation scores.
inline Eigen::MatrixXd brute_force_cr0(const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& u,
                                       const std::vector<int>& cluster_of) {
  const Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(
          Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  int G = 0;
  for (int c : cluster_of) G = std::max(G, c + 1);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  for (int g = 0; g < G; ++g) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(X.cols());
    for (int i = 0; i < X.rows(); ++i)
      if (cluster_of[i] == g) s += X.row(i).transpose() * u[i];
    meat += s * s.transpose();
  }
  return xtx_inv * meat * xtx_inv;
}

}  // namespace testutil
