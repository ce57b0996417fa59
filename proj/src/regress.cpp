#include "powershare/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "powershare/stats.hpp"

namespace powershare {

Grouping make_grouping(const std::vector<long long>& keys) {
  Grouping g;
  g.level.reserve(keys.size());
  std::unordered_map<long long, int> seen;
  for (long long k : keys) {
    auto [it, inserted] = seen.emplace(k, g.n_levels);
    if (inserted) ++g.n_levels;
    g.level.push_back(it->second);
  }
  return g;
}

Grouping cross_grouping(const Grouping& a, const Grouping& b) {
  std::vector<long long> keys(a.level.size());
  for (size_t i = 0; i < keys.size(); ++i)
    keys[i] = static_cast<long long>(a.level[i]) * b.n_levels + b.level[i];
  return make_grouping(keys);
}

namespace {

void demean_pass(Eigen::MatrixXd& M, const Grouping& g,
                 const std::vector<int>& counts) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(g.n_levels, M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i) sums.row(g.level[i]) += M.row(i);
  for (int l = 0; l < g.n_levels; ++l) sums.row(l) /= counts[l];
  for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) -= sums.row(g.level[i]);
}

// Partial out {1, t} within each level; levels with no time variation are
// only demeaned.
void detrend_pass(Eigen::MatrixXd& M, const AbsorbSpec::Trend& tr,
                  const std::vector<int>& counts) {
  const Grouping& g = tr.groups;
  const int L = g.n_levels;
  Eigen::VectorXd sum_t = Eigen::VectorXd::Zero(L);
  Eigen::VectorXd sum_tt = Eigen::VectorXd::Zero(L);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    sum_t[g.level[i]] += tr.time[i];
    sum_tt[g.level[i]] += tr.time[i] * tr.time[i];
  }
  Eigen::MatrixXd sum_x = Eigen::MatrixXd::Zero(L, M.cols());
  Eigen::MatrixXd sum_tx = Eigen::MatrixXd::Zero(L, M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    sum_x.row(g.level[i]) += M.row(i);
    sum_tx.row(g.level[i]) += tr.time[i] * M.row(i);
  }
  Eigen::MatrixXd slope = Eigen::MatrixXd::Zero(L, M.cols());
  Eigen::MatrixXd icept(L, M.cols());
  for (int l = 0; l < L; ++l) {
    const double n = counts[l];
    const double var_t = sum_tt[l] - sum_t[l] * sum_t[l] / n;
    if (var_t > 1e-12) {
      slope.row(l) =
          (sum_tx.row(l) - sum_x.row(l) * (sum_t[l] / n)) / var_t;
    }
    icept.row(l) = sum_x.row(l) / n - slope.row(l) * (sum_t[l] / n);
  }
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    M.row(i) -= icept.row(g.level[i]) + slope.row(g.level[i]) * tr.time[i];
}

std::vector<int> level_counts(const Grouping& g, Eigen::Index n_rows) {
  std::vector<int> counts(g.n_levels, 0);
  for (Eigen::Index i = 0; i < n_rows; ++i) ++counts[g.level[i]];
  return counts;
}

}  // namespace

AbsorbInfo absorb_fixed_effects(Eigen::MatrixXd& M, const AbsorbSpec& spec) {
  AbsorbInfo info;
  const size_t n_proj = spec.categories.size() + spec.trends.size();
  if (n_proj == 0) return info;

  std::vector<std::vector<int>> cat_counts;
  for (const auto& g : spec.categories)
    cat_counts.push_back(level_counts(g, M.rows()));
  std::vector<std::vector<int>> tr_counts;
  for (const auto& tr : spec.trends)
    tr_counts.push_back(level_counts(tr.groups, M.rows()));

  Eigen::MatrixXd prev;
  for (int sweep = 1; sweep <= spec.max_sweeps; ++sweep) {
    prev = M;
    for (size_t j = 0; j < spec.categories.size(); ++j)
      demean_pass(M, spec.categories[j], cat_counts[j]);
    for (size_t j = 0; j < spec.trends.size(); ++j)
      detrend_pass(M, spec.trends[j], tr_counts[j]);
    info.sweeps = sweep;
    info.final_change = (M - prev).cwiseAbs().maxCoeff();
    if (info.final_change < spec.tol) return info;
  }
  info.converged = false;
  throw std::runtime_error(
      "absorb_fixed_effects: no convergence after " +
      std::to_string(spec.max_sweeps) +
      " sweeps (last change " + std::to_string(info.final_change) + ")");
}

OlsSolve solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  OlsSolve out;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  out.beta = qr.solve(y);
  out.residuals = y - X * out.beta;
  const Eigen::MatrixXd R = qr.matrixQR()
                                .topRows(X.cols())
                                .triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  out.xtx_inv = Rinv * Rinv.transpose();
  return out;
}

Eigen::MatrixXd cluster_vcov(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& residuals,
                             const Grouping& clusters,
                             const Eigen::MatrixXd& bread,
                             double correction) {
  std::vector<std::vector<int>> members(clusters.n_levels);
  for (size_t i = 0; i < clusters.level.size(); ++i)
    members[clusters.level[i]].push_back(static_cast<int>(i));

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  Eigen::VectorXd score(X.cols());
  for (int c = 0; c < clusters.n_levels; ++c) {
    score.setZero();
    for (int i : members[c]) score += X.row(i).transpose() * residuals[i];
    meat.noalias() += score * score.transpose();
  }
  return bread * (correction * meat) * bread;
}

TslsSolve solve_tsls(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_endog,
                     const Eigen::MatrixXd& X_exog,
                     const Eigen::MatrixXd& Z_excl) {
  const Eigen::Index n = y.size();
  const Eigen::Index k_en = X_endog.cols();
  const Eigen::Index k_ex = X_exog.cols();
  if (Z_excl.cols() < k_en)
    throw std::invalid_argument(
        "solve_tsls: fewer instruments than endogenous regressors");

  Eigen::MatrixXd Z(n, Z_excl.cols() + k_ex);
  Z << Z_excl, X_exog;

  TslsSolve out;
  out.fitted.resize(n, k_en + k_ex);
  out.first_stage_F.resize(k_en);
  const Eigen::HouseholderQR<Eigen::MatrixXd> zqr(Z);
  for (Eigen::Index j = 0; j < k_en; ++j) {
    const Eigen::VectorXd gamma = zqr.solve(X_endog.col(j));
    out.fitted.col(j) = Z * gamma;
    const double rss_u = (X_endog.col(j) - out.fitted.col(j)).squaredNorm();
    double rss_r;
    if (k_ex > 0) {
      const Eigen::VectorXd g0 =
          Eigen::HouseholderQR<Eigen::MatrixXd>(X_exog).solve(X_endog.col(j));
      rss_r = (X_endog.col(j) - X_exog * g0).squaredNorm();
    } else {
      rss_r = X_endog.col(j).squaredNorm();
    }
    const double q = static_cast<double>(Z_excl.cols());
    const double dof = static_cast<double>(n - Z.cols());
    out.first_stage_F[j] =
        (rss_u <= 0.0 || dof <= 0.0) ? std::numeric_limits<double>::infinity()
                                     : ((rss_r - rss_u) / q) / (rss_u / dof);
  }
  if (k_ex > 0) out.fitted.rightCols(k_ex) = X_exog;

  const OlsSolve second = solve_ols(out.fitted, y);
  out.beta = second.beta;
  out.xtx_inv = second.xtx_inv;
  Eigen::MatrixXd X_full(n, k_en + k_ex);
  X_full << X_endog, X_exog;
  out.residuals = y - X_full * out.beta;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ColumnPick {
  std::string name;
  const double PanelRow::*field;
  bool endogenous = false;
};

double safe_val(const PanelRow& r, const double PanelRow::*field) {
  return r.*field;
}

// Sequential scan: absorbed-away columns and columns collinear with earlier
// kept ones are removed, later column dropped first per the estimator's
// collinearity policy.
void prune_collinear(Eigen::MatrixXd& M, std::vector<std::string>& names,
                     const std::vector<double>& pre_norms,
                     std::vector<std::string>& dropped,
                     std::vector<int>* col_map = nullptr) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd basis(n, M.cols());
  Eigen::Index kept = 0;
  std::vector<int> keep_idx;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double scale = 1.0 + pre_norms[j];
    Eigen::VectorXd v = M.col(j);
    if (v.norm() < 1e-8 * scale) {
      dropped.push_back(names[j] + ": no variation after absorption");
      continue;
    }
    for (Eigen::Index k = 0; k < kept; ++k)
      v -= basis.col(k).dot(v) * basis.col(k);
    // second pass for numerical safety
    for (Eigen::Index k = 0; k < kept; ++k)
      v -= basis.col(k).dot(v) * basis.col(k);
    if (v.norm() < 1e-8 * scale) {
      dropped.push_back(names[j] + ": collinear, dropped");
      continue;
    }
    basis.col(kept) = v / v.norm();
    ++kept;
    keep_idx.push_back(static_cast<int>(j));
  }
  if (keep_idx.size() == static_cast<size_t>(M.cols())) {
    if (col_map) *col_map = keep_idx;
    return;
  }
  Eigen::MatrixXd pruned(n, keep_idx.size());
  std::vector<std::string> pruned_names;
  for (size_t j = 0; j < keep_idx.size(); ++j) {
    pruned.col(j) = M.col(keep_idx[j]);
    pruned_names.push_back(names[keep_idx[j]]);
  }
  M = std::move(pruned);
  names = std::move(pruned_names);
  if (col_map) *col_map = keep_idx;
}

}  // namespace

Design build_design(const Panel& panel, const RegressionSpec& spec) {
  if (panel.empty()) throw std::invalid_argument("build_design: empty panel");

  const bool lagged = spec.lag_mode == LagMode::LaggedRegressors;
  const bool iv = spec.lag_mode == LagMode::IvLagged;

  std::vector<ColumnPick> xcols;
  if (lagged) {
    xcols.push_back({"lag_size", &PanelRow::lag_size});
    if (spec.include_size_sq)
      xcols.push_back({"lag_size_sq", &PanelRow::lag_size_sq});
  } else {
    xcols.push_back({"size", &PanelRow::size, iv});
    if (spec.include_size_sq)
      xcols.push_back({"size_sq", &PanelRow::size_sq, iv});
  }
  if (spec.include_presence_abroad)
    xcols.push_back({"presence_abroad", &PanelRow::presence_abroad});

  std::vector<ColumnPick> zcols;
  if (iv) {
    zcols.push_back({"lag_size", &PanelRow::lag_size});
    if (spec.include_size_sq)
      zcols.push_back({"lag_size_sq", &PanelRow::lag_size_sq});
  }

  const double PanelRow::*ycol = spec.outcome == OutcomeVar::AccessBinary
                                     ? &PanelRow::access_binary
                                     : &PanelRow::access;

  // Sample: outcome/regressors/instruments present, optional access filter.
  std::vector<int> rows;
  for (size_t i = 0; i < panel.rows.size(); ++i) {
    const PanelRow& r = panel.rows[i];
    if (spec.max_access && !(r.access <= *spec.max_access + 1e-12)) continue;
    if (is_missing(safe_val(r, ycol))) continue;
    bool ok = true;
    for (const auto& c : xcols)
      if (is_missing(safe_val(r, c.field))) ok = false;
    for (const auto& c : zcols)
      if (is_missing(safe_val(r, c.field))) ok = false;
    if (ok) rows.push_back(static_cast<int>(i));
  }
  if (rows.empty())
    throw std::invalid_argument(
        "build_design: no usable observations (after filters/lagging)");

  // FE groupings are rebuilt per pruning pass; drop rows fully determined by
  // their own fixed effects ({1} for categorical levels, {1,t} for trends).
  const bool use_country = spec.fe_country && !spec.fe_country_period;
  const bool use_period = spec.fe_period && !spec.fe_country_period;
  int n_singletons = 0;
  for (bool changed = true; changed;) {
    changed = false;
    auto prune = [&](auto key_of, int min_rows) {
      std::unordered_map<long long, int> counts;
      for (int i : rows) ++counts[key_of(panel.rows[i])];
      std::vector<int> kept;
      kept.reserve(rows.size());
      for (int i : rows) {
        if (counts[key_of(panel.rows[i])] >= min_rows) kept.push_back(i);
        else ++n_singletons;
      }
      if (kept.size() != rows.size()) {
        rows = std::move(kept);
        changed = true;
      }
    };
    if (use_country)
      prune([](const PanelRow& r) { return r.country_id; }, 2);
    if (use_period)
      prune([](const PanelRow& r) { return (long long)r.period; }, 2);
    if (spec.fe_country_period)
      prune([](const PanelRow& r) { return r.country_id * 10000 + r.period; },
            2);
    if (spec.fe_group || spec.group_trends)
      prune([](const PanelRow& r) { return r.group_id * 100003 + r.country_id; },
            spec.group_trends ? 3 : 2);
    if (rows.empty())
      throw std::invalid_argument(
          "build_design: all observations dropped as singletons");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const bool any_fe = use_country || use_period || spec.fe_country_period ||
                      spec.fe_group || spec.group_trends;

  Design d;
  d.rows = rows;
  d.n_singletons_dropped = n_singletons;
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    d.y[i] = safe_val(panel.rows[rows[i]], ycol);

  std::vector<std::string> xnames;
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(xcols.size()) + (any_fe ? 0 : 1));
  Eigen::Index col = 0;
  if (!any_fe) {
    X.col(col).setOnes();
    xnames.push_back("const");
    ++col;
  }
  for (const auto& c : xcols) {
    for (Eigen::Index i = 0; i < n; ++i)
      X(i, col) = safe_val(panel.rows[rows[i]], c.field);
    xnames.push_back(c.name);
    ++col;
  }

  Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(zcols.size()));
  std::vector<std::string> znames;
  for (size_t j = 0; j < zcols.size(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i)
      Z(i, static_cast<Eigen::Index>(j)) =
          safe_val(panel.rows[rows[i]], zcols[j].field);
    znames.push_back(zcols[j].name);
  }

  // Absorption spec over the sample rows.
  std::vector<long long> country_keys(n), period_keys(n), group_keys(n);
  Eigen::VectorXd time(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PanelRow& r = panel.rows[rows[i]];
    country_keys[i] = r.country_id;
    period_keys[i] = r.period;
    group_keys[i] = r.group_id * 100003 + r.country_id;
    time[i] = r.period;
  }
  const Grouping country_g = make_grouping(country_keys);
  const Grouping period_g = make_grouping(period_keys);

  AbsorbSpec aspec;
  int n_absorbed = 0;
  auto add_cat = [&](const Grouping& g) {
    n_absorbed += g.n_levels - (aspec.categories.empty() ? 0 : 1);
    aspec.categories.push_back(g);
  };
  if (use_country) add_cat(country_g);
  if (use_period) add_cat(period_g);
  if (spec.fe_country_period) add_cat(cross_grouping(country_g, period_g));
  Grouping group_g;
  if (spec.fe_group || spec.group_trends) group_g = make_grouping(group_keys);
  if (spec.fe_group) add_cat(group_g);
  if (spec.group_trends) {
    // slopes; intercepts already counted when group FE is active
    n_absorbed += spec.fe_group ? group_g.n_levels
                                : 2 * group_g.n_levels -
                                      (aspec.categories.empty() ? 0 : 1);
    aspec.trends.push_back({group_g, time});
  }
  d.n_absorbed = n_absorbed;

  std::vector<double> pre_norms;
  for (Eigen::Index j = 0; j < X.cols(); ++j) pre_norms.push_back(X.col(j).norm());
  std::vector<double> z_pre_norms;
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    z_pre_norms.push_back(Z.col(j).norm());

  if (!aspec.categories.empty() || !aspec.trends.empty()) {
    Eigen::MatrixXd M(n, 1 + X.cols() + Z.cols());
    M.col(0) = d.y;
    M.middleCols(1, X.cols()) = X;
    if (Z.cols() > 0) M.rightCols(Z.cols()) = Z;
    d.absorb = absorb_fixed_effects(M, aspec);
    d.y = M.col(0);
    X = M.middleCols(1, X.cols());
    if (Z.cols() > 0) Z = M.rightCols(Z.cols());
  }

  prune_collinear(X, xnames, pre_norms, d.dropped);
  if (Z.cols() > 0) prune_collinear(Z, znames, z_pre_norms, d.dropped);

  d.X = std::move(X);
  d.colnames = std::move(xnames);
  d.Z = std::move(Z);
  d.znames = std::move(znames);
  for (size_t j = 0; j < d.colnames.size(); ++j) {
    if ((d.colnames[j] == "size" || d.colnames[j] == "size_sq") && iv)
      d.endogenous.push_back(static_cast<int>(j));
  }

  std::vector<long long> cluster_keys;
  cluster_keys.reserve(rows.size());
  for (int i : rows) cluster_keys.push_back(panel.rows[i].country_id);
  d.clusters = make_grouping(cluster_keys);
  return d;
}

int FitResult::coef_index(const std::string& name) const {
  for (size_t i = 0; i < coef_names.size(); ++i)
    if (coef_names[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

void finalize_fit(FitResult& fit, const Design& design, const Panel& panel,
                  const RegressionSpec& spec, const Eigen::MatrixXd& score_X,
                  const Eigen::VectorXd& residuals,
                  const Eigen::MatrixXd& bread) {
  fit.n_obs = static_cast<int>(design.y.size());
  fit.n_clusters = design.clusters.n_levels;
  fit.n_absorbed = design.n_absorbed;
  fit.n_singletons_dropped = design.n_singletons_dropped;
  fit.dropped = design.dropped;
  fit.sample_rows = design.rows;

  if (fit.n_clusters < 2)
    throw std::invalid_argument(
        "fit: insufficient clusters for cluster-robust covariance (" +
        std::to_string(fit.n_clusters) + ")");

  double correction = 1.0;
  fit.vcov_kind = "CR0";
  if (spec.cluster_correction) {
    const double G = fit.n_clusters;
    const double N = fit.n_obs;
    const double K =
        static_cast<double>(score_X.cols()) + design.n_absorbed;
    if (N > K) {
      correction = (G / (G - 1.0)) * ((N - 1.0) / (N - K));
      fit.vcov_kind = "CR0-corrected";
    }
  }
  fit.vcov = cluster_vcov(score_X, residuals, design.clusters, bread,
                          correction);

  const bool lagged = spec.lag_mode == LagMode::LaggedRegressors;
  const int b1 = fit.coef_index(lagged ? "lag_size" : "size");
  const int b2 = fit.coef_index(lagged ? "lag_size_sq" : "size_sq");
  if (b1 >= 0 && b2 >= 0) {
    fit.wald_joint = wald_joint(fit, {b1, b2}, spec.wald_f_reference,
                                 fit.n_clusters - 1.0);
    if (fit.beta[b2] < 0.0) {
      const PeakResult pk = peak_inference(fit, panel);
      fit.has_peak = true;
      fit.peak = pk.peak;
      fit.peak_se = pk.se;
      fit.peak_percentile = pk.percentile;
    }
  }
}

}  // namespace

FitResult fit_ols(const Panel& panel, const RegressionSpec& spec) {
  Design design = build_design(panel, spec);
  if (design.X.cols() == 0) {
    std::string detail;
    for (const auto& s : design.dropped) detail += " [" + s + "]";
    throw std::runtime_error("fit_ols: design is rank deficient," +
                             (detail.empty() ? std::string(" no columns")
                                             : detail));
  }
  const OlsSolve sol = solve_ols(design.X, design.y);
  FitResult fit;
  fit.coef_names = design.colnames;
  fit.beta = sol.beta;
  finalize_fit(fit, design, panel, spec, design.X, sol.residuals, sol.xtx_inv);
  return fit;
}

FitResult fit_iv(const Panel& panel, const RegressionSpec& spec) {
  if (spec.lag_mode != LagMode::IvLagged)
    throw std::invalid_argument("fit_iv: spec.lag_mode must be IvLagged");
  Design design = build_design(panel, spec);
  if (design.endogenous.empty())
    throw std::runtime_error("fit_iv: endogenous regressors absorbed away");
  if (static_cast<Eigen::Index>(design.Z.cols()) <
      static_cast<Eigen::Index>(design.endogenous.size()))
    throw std::runtime_error(
        "fit_iv: degenerate first stage, fewer usable instruments than "
        "endogenous regressors");

  const Eigen::Index k = design.X.cols();
  std::vector<int> exog;
  for (Eigen::Index j = 0; j < k; ++j)
    if (std::find(design.endogenous.begin(), design.endogenous.end(), j) ==
        design.endogenous.end())
      exog.push_back(static_cast<int>(j));

  Eigen::MatrixXd X_en(design.X.rows(), design.endogenous.size());
  for (size_t j = 0; j < design.endogenous.size(); ++j)
    X_en.col(j) = design.X.col(design.endogenous[j]);
  Eigen::MatrixXd X_ex(design.X.rows(), exog.size());
  for (size_t j = 0; j < exog.size(); ++j)
    X_ex.col(j) = design.X.col(exog[j]);

  const TslsSolve sol = solve_tsls(design.y, X_en, X_ex, design.Z);

  FitResult fit;
  for (int j : design.endogenous) fit.coef_names.push_back(design.colnames[j]);
  for (int j : exog) fit.coef_names.push_back(design.colnames[j]);
  fit.beta = sol.beta;
  fit.first_stage_F = sol.first_stage_F;
  finalize_fit(fit, design, panel, spec, sol.fitted, sol.residuals,
               sol.xtx_inv);
  return fit;
}

WaldResult wald_joint(const FitResult& fit, const std::vector<int>& coef_idx,
                      bool f_reference, double denom_df) {
  const int q = static_cast<int>(coef_idx.size());
  Eigen::VectorXd b(q);
  Eigen::MatrixXd V(q, q);
  for (int i = 0; i < q; ++i) {
    b[i] = fit.beta[coef_idx[i]];
    for (int j = 0; j < q; ++j) V(i, j) = fit.vcov(coef_idx[i], coef_idx[j]);
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("wald_joint: restricted covariance is singular");
  WaldResult w;
  w.stat = b.dot(ldlt.solve(b));
  w.df = q;
  w.f_reference = f_reference;
  if (f_reference) {
    if (denom_df <= 0.0)
      throw std::invalid_argument("wald_joint: F reference needs denom_df");
    w.p_value = f_dist_sf(w.stat / q, q, denom_df);
  } else {
    w.p_value = chi_squared_sf(w.stat, q);
  }
  return w;
}

PeakResult peak_inference(const FitResult& fit, const Panel& panel) {
  const bool lagged = fit.coef_index("lag_size") >= 0 &&
                      fit.coef_index("size") < 0;
  const int b1 = fit.coef_index(lagged ? "lag_size" : "size");
  const int b2 = fit.coef_index(lagged ? "lag_size_sq" : "size_sq");
  if (b1 < 0 || b2 < 0)
    throw std::invalid_argument(
        "peak_inference: quadratic size terms not in fit");
  const double beta1 = fit.beta[b1];
  const double beta2 = fit.beta[b2];
  if (beta2 >= 0.0)
    throw std::domain_error(
        "peak_inference: wrong curvature, size_sq coefficient is not "
        "negative");
  PeakResult out;
  out.peak = -beta1 / (2.0 * beta2);
  Eigen::Vector2d grad(-1.0 / (2.0 * beta2), beta1 / (2.0 * beta2 * beta2));
  Eigen::Matrix2d V;
  V << fit.vcov(b1, b1), fit.vcov(b1, b2), fit.vcov(b2, b1), fit.vcov(b2, b2);
  out.se = std::sqrt(grad.dot(V * grad));

  int below = 0, total = 0;
  for (int i : fit.sample_rows) {
    const double v =
        lagged ? panel.rows[i].lag_size : panel.rows[i].size;
    if (is_missing(v)) continue;
    ++total;
    if (v <= out.peak) ++below;
  }
  out.percentile = total > 0 ? 100.0 * below / total : 0.0;
  return out;
}

}  // namespace powershare
