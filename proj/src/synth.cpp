#include "powershare/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "powershare/model.hpp"
#include "powershare/stats.hpp"

namespace powershare {

void SynthConfig::validate() const {
  if (n_countries < 1 || groups_min < 1 || n_periods < 1)
    throw std::invalid_argument("SynthConfig: counts must be >= 1");
  if (groups_max < groups_min)
    throw std::invalid_argument("SynthConfig: groups_max < groups_min");
  if (!(noise_sigma > 0.0))
    throw std::invalid_argument("SynthConfig: noise_sigma must be > 0");
  if (lambda.hi < lambda.lo || a1.hi < a1.lo || gamma.hi < gamma.lo)
    throw std::invalid_argument("SynthConfig: inverted parameter range");
  if (lambda.lo <= 0.0 || lambda.hi >= 1.0)
    throw std::invalid_argument("SynthConfig: lambda range outside (0,1)");
  if (a1.lo < 0.0)
    throw std::invalid_argument("SynthConfig: a1 range below 0");
  if (gamma.lo < 0.0 || gamma.hi > 1.0)
    throw std::invalid_argument("SynthConfig: gamma range outside [0,1]");
  if (size_vol < 0.0 || presence_sigma < 0.0)
    throw std::invalid_argument("SynthConfig: negative scale");
  if (!(size_floor > 0.0 && size_floor < size_cap && size_cap < 1.0))
    throw std::invalid_argument("SynthConfig: bad share bounds");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Reflect log-odds back into [lo, hi] so shares stay clear of 0 and 1.
double reflect(double x, double lo, double hi) {
  for (int guard = 0; guard < 64 && (x < lo || x > hi); ++guard) {
    if (x < lo) x = 2.0 * lo - x;
    if (x > hi) x = 2.0 * hi - x;
  }
  return std::clamp(x, lo, hi);
}

double draw_range(std::mt19937_64& rng, const ParamRange& r) {
  if (r.hi <= r.lo) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

constexpr int kRetryCap = 100;

}  // namespace

SynthPanel generate(const SynthConfig& config) {
  config.validate();
  SynthPanel sp;
  sp.truth.mode = config.mode;
  sp.truth.alpha = config.alpha;
  sp.truth.beta1 = config.beta1;
  sp.truth.beta2 = config.beta2;

  const double lo_logit = logit(config.size_floor);
  const double hi_logit = logit(config.size_cap);

  for (int c = 0; c < config.n_countries; ++c) {
    const long long country_id = c + 1;
    std::mt19937_64 rng(splitmix64(
        config.seed ^ (0x5851F42D4C957F2DULL + static_cast<std::uint64_t>(c))));
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    ModelParams<double> params;
    params.gamma = draw_range(rng, config.gamma);
    int tries = 0;
    do {
      params.lambda = draw_range(rng, config.lambda);
      params.a1 = draw_range(rng, config.a1);
      if (++tries > kRetryCap)
        throw std::invalid_argument(
            "generate: parameter ranges never satisfy lambda/(1-lambda) > a1");
    } while (!assumption_holds(params));
    params.validate();

    CountryTruth ct;
    ct.country_id = country_id;
    ct.lambda = params.lambda;
    ct.a1 = params.a1;
    ct.gamma = params.gamma;
    if (params.a1 > 0.0) ct.delta_star = thresholds(params).delta_star;
    sp.truth.countries.push_back(ct);

    const int n_groups =
        config.groups_min +
        (config.groups_max > config.groups_min
             ? static_cast<int>(unif(rng) *
                                (config.groups_max - config.groups_min + 1))
             : 0);

    // Initial shares: a drawn minority total split Dirichlet-style, so the
    // country always keeps headroom for the incumbent bloc.
    const double total = 0.15 + 0.7 * unif(rng);
    std::vector<double> weights(n_groups);
    double wsum = 0.0;
    for (auto& w : weights) {
      w = -std::log(unif(rng));
      wsum += w;
    }
    std::vector<double> logits(n_groups);
    for (int g = 0; g < n_groups; ++g) {
      const double share = std::clamp(total * weights[g] / wsum,
                                      config.size_floor, config.size_cap);
      logits[g] = logit(share);
    }

    // sizes[g][t]; innovations for a country-period are re-drawn wholesale
    // when the proposal would push the share sum past 1.
    std::vector<std::vector<double>> sizes(n_groups,
                                           std::vector<double>(config.n_periods));
    for (int t = 0; t < config.n_periods; ++t) {
      std::vector<double> proposal(n_groups);
      int retry = 0;
      for (;; ++retry) {
        if (retry > kRetryCap)
          throw std::runtime_error("generate: share overflow, country " +
                                   std::to_string(country_id) + " period " +
                                   std::to_string(t + 1));
        double sum = 0.0;
        for (int g = 0; g < n_groups; ++g) {
          double x = logits[g];
          if (t > 0)
            x = reflect(x + config.size_drift + config.size_vol * stdnorm(rng),
                        lo_logit, hi_logit);
          proposal[g] = x;
          sum += sigmoid(x);
        }
        if (sum <= 1.0) break;
      }
      for (int g = 0; g < n_groups; ++g) {
        logits[g] = proposal[g];
        sizes[g][t] = sigmoid(proposal[g]);
      }
    }

    // Remaining draws come from a separate stream so size retries above do
    // not shift them.
    std::mt19937_64 shock_rng(splitmix64(
        config.seed ^ (0xA24BAED4963EE407ULL + static_cast<std::uint64_t>(c))));
    std::normal_distribution<double> shock(0.0, 1.0);

    std::vector<double> fe_ct(config.n_periods, 0.0);
    std::vector<double> eta_g(n_groups, 0.0);
    if (config.mode == DgpMode::Quadratic) {
      if (config.fe_country_period_sigma > 0.0)
        for (auto& v : fe_ct) v = config.fe_country_period_sigma * shock(shock_rng);
      if (config.fe_group_sigma > 0.0)
        for (auto& v : eta_g) v = config.fe_group_sigma * shock(shock_rng);
    }

    for (int g = 0; g < n_groups; ++g) {
      const long long group_id = country_id * 10000 + g + 1;
      for (int t = 0; t < config.n_periods; ++t) {
        PanelRow r;
        r.group_id = group_id;
        r.country_id = country_id;
        r.period = t + 1;
        r.size = sizes[g][t];
        r.size_sq = r.size * r.size;
        r.presence_abroad =
            config.presence_sigma > 0.0
                ? std::fabs(config.presence_sigma * shock(shock_rng))
                : 0.0;
        if (t > 0) {
          r.lag_size = sizes[g][t - 1];
          r.lag_size_sq = r.lag_size * r.lag_size;
        }

        if (config.mode == DgpMode::Model) {
          const double h = h_value(r.size, params);
          const double latent =
              normal_cdf(h / config.noise_sigma + shock(shock_rng));
          r.access = latent < 1.0 / 3.0 ? 0.0 : latent < 2.0 / 3.0 ? 1.0 : 2.0;
          sp.truth.row_h.push_back(h);
        } else {
          const double eps = config.noise_sigma * shock(shock_rng);
          r.access = config.alpha + config.beta1 * r.size +
                     config.beta2 * r.size_sq + fe_ct[t] + eta_g[g] + eps;
          sp.truth.row_fe.push_back(fe_ct[t] + eta_g[g]);
        }
        r.access_binary = r.access > 1.0 ? 1.0 : 0.0;
        sp.panel.rows.push_back(r);
      }
    }
  }

  sp.panel.validate();
  return sp;
}

TruthReport truth_report(const SynthPanel& sp) {
  if (sp.panel.empty())
    throw std::invalid_argument("truth_report: empty panel");
  TruthReport rep;
  rep.mode = sp.truth.mode;
  rep.beta1 = sp.truth.beta1;
  rep.beta2 = sp.truth.beta2;
  rep.countries = sp.truth.countries;
  if (sp.truth.mode == DgpMode::Quadratic) {
    if (sp.truth.beta2 != 0.0)
      rep.true_peak = -sp.truth.beta1 / (2.0 * sp.truth.beta2);
  } else if (!sp.truth.countries.empty()) {
    bool all_same = sp.truth.countries[0].delta_star.has_value();
    for (const auto& c : sp.truth.countries)
      if (!c.delta_star ||
          std::fabs(*c.delta_star - *sp.truth.countries[0].delta_star) > 1e-12)
        all_same = false;
    if (all_same) rep.true_peak = sp.truth.countries[0].delta_star;
  }
  return rep;
}

std::string truth_to_json(const SynthPanel& sp) {
  nlohmann::json j;
  j["mode"] = sp.truth.mode == DgpMode::Model ? "model" : "quadratic";
  j["alpha"] = sp.truth.alpha;
  j["beta1"] = sp.truth.beta1;
  j["beta2"] = sp.truth.beta2;
  const TruthReport rep = truth_report(sp);
  if (rep.true_peak) j["true_peak"] = *rep.true_peak;
  auto& countries = j["countries"] = nlohmann::json::array();
  for (const auto& c : sp.truth.countries) {
    nlohmann::json jc{{"country_id", c.country_id},
                      {"lambda", c.lambda},
                      {"a1", c.a1},
                      {"gamma", c.gamma}};
    if (c.delta_star) jc["delta_star"] = *c.delta_star;
    countries.push_back(jc);
  }
  if (!sp.truth.row_h.empty()) j["row_h"] = sp.truth.row_h;
  if (!sp.truth.row_fe.empty()) j["row_fe"] = sp.truth.row_fe;
  return j.dump(2);
}

}  // namespace powershare
