#pragma once

// Fixed-effects panel least squares for the quadratic access-vs-size
// specification: alternating-projection FE absorption, cluster-robust
// covariance, lagged-regressor and 2SLS variants, joint tests, and
// peak-location inference.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "powershare/panel.hpp"

namespace powershare {

// ---------------------------------------------------------------------------
// Matrix-level building blocks.

// Rows partitioned into dense 0-based levels.
struct Grouping {
  std::vector<int> level;
  int n_levels = 0;
};

// Map arbitrary keys to levels in order of first appearance.
Grouping make_grouping(const std::vector<long long>& keys);
Grouping cross_grouping(const Grouping& a, const Grouping& b);

struct AbsorbSpec {
  std::vector<Grouping> categories;        // demean within each level
  // Partial out {1, t} per level of `groups` (group-specific linear trends).
  struct Trend {
    Grouping groups;
    Eigen::VectorXd time;
  };
  std::vector<Trend> trends;
  double tol = 1e-10;
  int max_sweeps = 10000;
};

struct AbsorbInfo {
  int sweeps = 0;
  double final_change = 0.0;
  bool converged = true;
};

// Sweep all projections until the largest absolute cell change in M falls
// below tol. Throws on non-convergence.
AbsorbInfo absorb_fixed_effects(Eigen::MatrixXd& M, const AbsorbSpec& spec);

struct OlsSolve {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd xtx_inv;
};

OlsSolve solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// CR0 sandwich: bread * (sum_c X_c'u_c u_c'X_c) * bread, accumulated in
// cluster-level order. `correction` scales the meat (1 for plain CR0).
Eigen::MatrixXd cluster_vcov(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& residuals,
                             const Grouping& clusters,
                             const Eigen::MatrixXd& bread,
                             double correction = 1.0);

struct TslsSolve {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;      // structural: y - X beta
  Eigen::MatrixXd fitted;         // [P_Z X_endog, X_exog]
  Eigen::MatrixXd xtx_inv;        // (fitted' fitted)^-1
  Eigen::VectorXd first_stage_F;  // per endogenous column
};

// X = [X_endog, X_exog], instruments Z = [Z_excl, X_exog].
TslsSolve solve_tsls(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_endog,
                     const Eigen::MatrixXd& X_exog,
                     const Eigen::MatrixXd& Z_excl);

// ---------------------------------------------------------------------------
// Panel-level estimator.

enum class OutcomeVar { AccessOrdinal, AccessBinary };
enum class LagMode { Contemporaneous, LaggedRegressors, IvLagged };

struct RegressionSpec {
  OutcomeVar outcome = OutcomeVar::AccessOrdinal;
  bool include_size_sq = true;
  bool include_presence_abroad = false;
  bool fe_country = false;
  bool fe_period = false;
  bool fe_country_period = false;   // subsumes fe_country/fe_period
  bool fe_group = false;
  bool group_trends = false;
  LagMode lag_mode = LagMode::Contemporaneous;
  std::optional<double> max_access;   // keep rows with access <= threshold
  bool cluster_correction = false;    // G/(G-1) * (N-1)/(N-K) scaling on CR0
  bool wald_f_reference = false;      // F instead of chi-squared joint test
};

struct Design {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;                  // absorbed regressors, kept columns only
  std::vector<std::string> colnames;
  Eigen::MatrixXd Z;                  // absorbed excluded instruments (IV)
  std::vector<std::string> znames;
  std::vector<int> endogenous;        // X column indices instrumented by Z
  Grouping clusters;                  // by country
  std::vector<int> rows;              // panel row indices in the sample
  int n_absorbed = 0;
  int n_singletons_dropped = 0;
  AbsorbInfo absorb;
  std::vector<std::string> dropped;   // collinear columns, with reason
};

Design build_design(const Panel& panel, const RegressionSpec& spec);

struct WaldResult {
  double stat = 0.0;
  double p_value = 1.0;
  double df = 0.0;
  bool f_reference = false;
};

struct FitResult {
  std::vector<std::string> coef_names;
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;
  std::string vcov_kind;              // "CR0" or "CR0-corrected"
  int n_obs = 0;
  int n_clusters = 0;
  int n_absorbed = 0;
  int n_singletons_dropped = 0;
  std::vector<std::string> dropped;
  std::vector<int> sample_rows;       // panel rows in the estimation sample
  WaldResult wald_joint;              // size and size_sq jointly zero
  bool has_peak = false;              // only when the size_sq coef is < 0
  double peak = 0.0;
  double peak_se = 0.0;
  double peak_percentile = 0.0;
  Eigen::VectorXd first_stage_F;      // empty unless IV

  double se(int i) const { return std::sqrt(vcov(i, i)); }
  int coef_index(const std::string& name) const;
};

FitResult fit_ols(const Panel& panel, const RegressionSpec& spec);
FitResult fit_iv(const Panel& panel, const RegressionSpec& spec);

// Wald test that the listed coefficients are jointly zero.
WaldResult wald_joint(const FitResult& fit, const std::vector<int>& coef_idx,
                      bool f_reference = false, double denom_df = 0.0);

struct PeakResult {
  double peak = 0.0;
  double se = 0.0;
  double percentile = 0.0;   // position of peak in the sample size distribution
};

// -beta1/(2 beta2) with delta-method SE; requires beta2 < 0.
PeakResult peak_inference(const FitResult& fit, const Panel& panel);

}  // namespace powershare
