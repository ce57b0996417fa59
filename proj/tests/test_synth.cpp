#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "powershare/model.hpp"
#include "powershare/regress.hpp"
#include "powershare/synth.hpp"

using namespace powershare;

TEST_CASE("determinism: same seed, same bytes") {
  SynthConfig cfg;
  cfg.n_countries = 12;
  cfg.n_periods = 6;
  cfg.seed = 42;
  const std::string a = panel_to_csv(generate(cfg).panel);
  const std::string b = panel_to_csv(generate(cfg).panel);
  CHECK(a == b);
  cfg.seed = 43;
  CHECK(panel_to_csv(generate(cfg).panel) != a);
}

TEST_CASE("share validity and lag alignment") {
  SynthConfig cfg;
  cfg.n_countries = 40;
  cfg.groups_min = 2;
  cfg.groups_max = 5;
  cfg.n_periods = 10;
  cfg.size_vol = 0.3;
  cfg.seed = 7;
  const SynthPanel sp = generate(cfg);

  std::map<std::pair<long long, int>, double> sums;
  std::map<std::pair<long long, int>, double> size_at;
  for (const auto& r : sp.panel.rows) {
    CHECK(r.size > 0.0);
    CHECK(r.size < 1.0);
    sums[{r.country_id, r.period}] += r.size;
    size_at[{r.group_id, r.period}] = r.size;
  }
  for (const auto& [key, total] : sums) CHECK(total <= 1.0 + 1e-12);

  for (const auto& r : sp.panel.rows) {
    if (r.period == 1) {
      CHECK(is_missing(r.lag_size));
    } else {
      CHECK(r.lag_size == size_at[{r.group_id, r.period - 1}]);
      CHECK(r.lag_size_sq == doctest::Approx(r.lag_size * r.lag_size));
    }
  }
}

TEST_CASE("noiseless quadratic mode identifies the coefficients") {
  SynthConfig cfg;
  cfg.mode = DgpMode::Quadratic;
  cfg.n_countries = 20;
  cfg.groups_min = cfg.groups_max = 2;
  cfg.n_periods = 5;
  cfg.beta1 = 2.0;
  cfg.beta2 = -2.0;
  cfg.noise_sigma = 1e-12;
  cfg.presence_sigma = 0.0;
  cfg.seed = 11;
  const SynthPanel sp = generate(cfg);

  RegressionSpec spec;
  const FitResult fit = fit_ols(sp.panel, spec);
  CHECK(fit.beta[fit.coef_index("size")] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.beta[fit.coef_index("size_sq")] ==
        doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(fit.beta[fit.coef_index("const")] ==
        doctest::Approx(cfg.alpha).epsilon(1e-6));
}

TEST_CASE("quadratic mode with fixed effects still recovers the curve") {
  SynthConfig cfg;
  cfg.mode = DgpMode::Quadratic;
  cfg.n_countries = 60;
  cfg.groups_min = 2;
  cfg.groups_max = 4;
  cfg.n_periods = 8;
  cfg.noise_sigma = 0.3;
  cfg.fe_country_period_sigma = 0.8;
  cfg.fe_group_sigma = 0.8;
  cfg.seed = 13;
  const SynthPanel sp = generate(cfg);

  RegressionSpec spec;
  spec.fe_country_period = true;
  spec.fe_group = true;
  const FitResult fit = fit_ols(sp.panel, spec);
  CHECK(fit.beta[fit.coef_index("size")] == doctest::Approx(2.0).epsilon(0.25));
  CHECK(fit.beta[fit.coef_index("size_sq")] ==
        doctest::Approx(-2.0).epsilon(0.25));
}

TEST_CASE("model mode produces the inverted U when gamma = 1") {
  SynthConfig cfg;
  cfg.mode = DgpMode::Model;
  cfg.n_countries = 200;
  cfg.groups_min = 1;
  cfg.groups_max = 2;
  cfg.n_periods = 20;
  cfg.noise_sigma = 0.4;
  cfg.size_vol = 0.25;
  cfg.seed = 17;
  const SynthPanel sp = generate(cfg);

  RegressionSpec spec;
  const FitResult fit = fit_ols(sp.panel, spec);
  const int i1 = fit.coef_index("size");
  const int i2 = fit.coef_index("size_sq");
  CHECK(fit.beta[i1] > 0.0);
  CHECK(fit.beta[i2] < 0.0);
  CHECK(fit.beta[i1] / fit.se(i1) > 2.0);
  CHECK(fit.beta[i2] / fit.se(i2) < -2.0);
}

TEST_CASE("high-score probability by size decile follows the regime") {
  auto decile_curve = [](const SynthPanel& sp) {
    std::vector<double> sizes;
    for (const auto& r : sp.panel.rows) sizes.push_back(r.size);
    std::vector<double> sorted = sizes;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> hits(10, 0.0), counts(10, 0.0);
    for (const auto& r : sp.panel.rows) {
      const auto rank = std::lower_bound(sorted.begin(), sorted.end(), r.size) -
                        sorted.begin();
      int bin = static_cast<int>(10.0 * rank / sorted.size());
      bin = std::min(bin, 9);
      counts[bin] += 1.0;
      hits[bin] += r.access >= 2.0 ? 1.0 : 0.0;
    }
    std::vector<double> p(10);
    for (int b = 0; b < 10; ++b) p[b] = counts[b] > 0 ? hits[b] / counts[b] : 0.0;
    std::vector<double> edges(11);
    edges[0] = sorted.front();
    for (int b = 1; b < 10; ++b) edges[b] = sorted[sorted.size() * b / 10];
    edges[10] = sorted.back();
    return std::make_pair(p, edges);
  };

  SynthConfig cfg;
  cfg.mode = DgpMode::Model;
  cfg.n_countries = 300;
  cfg.groups_min = 1;
  cfg.groups_max = 2;
  cfg.n_periods = 20;
  cfg.noise_sigma = 0.4;
  cfg.size_vol = 0.3;
  cfg.seed = 19;

  SUBCASE("gamma = 1: single peak within two bins of delta*") {
    const SynthPanel sp = generate(cfg);
    auto [p, edges] = decile_curve(sp);
    const int peak_bin = static_cast<int>(
        std::max_element(p.begin(), p.end()) - p.begin());
    ModelParams<double> mp;
    mp.lambda = 0.5;
    mp.a1 = 0.1;
    const double dstar = thresholds(mp).delta_star;
    int dstar_bin = 9;
    for (int b = 0; b < 10; ++b)
      if (dstar >= edges[b] && dstar <= edges[b + 1]) dstar_bin = b;
    CHECK(std::abs(peak_bin - dstar_bin) <= 2);
  }

  SUBCASE("gamma below gamma*: weakly increasing") {
    cfg.gamma = {0.4, 0.4};
    const SynthPanel sp = generate(cfg);
    auto [p, edges] = decile_curve(sp);
    for (int b = 1; b < 10; ++b) CHECK(p[b] >= p[b - 1] - 0.02);
    CHECK(p[9] > p[0]);
  }
}

TEST_CASE("truth report") {
  SynthConfig cfg;
  cfg.mode = DgpMode::Quadratic;
  cfg.beta1 = 2.0;
  cfg.beta2 = -2.0;
  cfg.n_countries = 3;
  SynthPanel sp = generate(cfg);
  const TruthReport quad = truth_report(sp);
  REQUIRE(quad.true_peak.has_value());
  CHECK(*quad.true_peak == doctest::Approx(0.5));

  SynthConfig mcfg;
  mcfg.mode = DgpMode::Model;
  mcfg.n_countries = 4;
  const TruthReport model = truth_report(generate(mcfg));
  REQUIRE(model.true_peak.has_value());
  CHECK(*model.true_peak == doctest::Approx(0.6837722).epsilon(1e-6));

  SynthPanel empty;
  CHECK_THROWS_AS(truth_report(empty), std::invalid_argument);
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.noise_sigma = 0.0;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
  cfg = {};
  cfg.groups_max = 0;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
  cfg = {};
  cfg.lambda = {0.9, 0.9};
  cfg.a1 = {20.0, 20.0};  // assumption can never hold
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}
