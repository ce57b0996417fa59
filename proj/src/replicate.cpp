#include "powershare/replicate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "powershare/csv.hpp"
#include "powershare/stats.hpp"

namespace powershare {

namespace {

struct LadderStep {
  const char* name;
  void (*apply)(RegressionSpec&);
};

const LadderStep kLadder[] = {
    {"(1) no FE", [](RegressionSpec&) {}},
    {"(2) country + period FE",
     [](RegressionSpec& s) {
       s.fe_country = true;
       s.fe_period = true;
     }},
    {"(3) country x period FE",
     [](RegressionSpec& s) { s.fe_country_period = true; }},
    {"(4) + group FE",
     [](RegressionSpec& s) {
       s.fe_country_period = true;
       s.fe_group = true;
     }},
    {"(5) + group trends",
     [](RegressionSpec& s) {
       s.fe_country_period = true;
       s.fe_group = true;
       s.group_trends = true;
     }},
};

Panel subset_panel(const Panel& panel, SampleSplit split, bool high) {
  Panel out;
  for (const auto& r : panel.rows) {
    const double flag = split == SampleSplit::Openness
                            ? r.high_openness
                            : r.high_competitiveness;
    if (is_missing(flag)) continue;
    if ((flag > 0.5) == high) out.rows.push_back(r);
  }
  return out;
}

void run_ladder(const Panel& panel, const SuiteMenu& menu, LagMode lag,
                OutcomeVar outcome, const std::string& variant,
                const std::string& subset, SuiteResult& suite) {
  for (const auto& step : kLadder) {
    RegressionSpec spec;
    spec.outcome = outcome;
    spec.lag_mode = lag;
    spec.include_presence_abroad = menu.presence_abroad;
    spec.max_access = menu.max_access;
    spec.cluster_correction = menu.cluster_correction;
    spec.wald_f_reference = menu.wald_f_reference;
    step.apply(spec);

    SuiteCell cell;
    cell.column = step.name;
    cell.variant = variant;
    cell.subset = subset;
    cell.spec = spec;
    try {
      cell.fit = lag == LagMode::IvLagged ? fit_iv(panel, spec)
                                          : fit_ols(panel, spec);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    suite.cells.push_back(std::move(cell));
  }
}

// Low-openness samples also get the linear column: the monotone pattern the
// splits are meant to surface.
void run_linear(const Panel& panel, const SuiteMenu& menu, LagMode lag,
                const std::string& variant, const std::string& subset,
                SuiteResult& suite) {
  RegressionSpec spec;
  spec.lag_mode = lag;
  spec.include_size_sq = false;
  spec.include_presence_abroad = menu.presence_abroad;
  spec.max_access = menu.max_access;
  spec.cluster_correction = menu.cluster_correction;
  spec.fe_country_period = true;
  spec.fe_group = true;

  SuiteCell cell;
  cell.column = "(L) linear, country x period + group FE";
  cell.variant = variant;
  cell.subset = subset;
  cell.spec = spec;
  try {
    cell.fit = lag == LagMode::IvLagged ? fit_iv(panel, spec)
                                        : fit_ols(panel, spec);
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  suite.cells.push_back(std::move(cell));
}

std::string variant_name(LagMode lag) {
  switch (lag) {
    case LagMode::Contemporaneous: return "baseline";
    case LagMode::LaggedRegressors: return "lagged";
    case LagMode::IvLagged: return "iv";
  }
  return "?";
}

}  // namespace

SuiteResult replicate_suite(const Panel& panel, const SuiteMenu& menu) {
  SuiteResult suite;
  if (menu.split != SampleSplit::None) {
    const bool have_flags = menu.split == SampleSplit::Openness
                                ? panel.has_openness_flags()
                                : panel.has_competitiveness_flags();
    if (!have_flags)
      throw SchemaError(
          menu.split == SampleSplit::Openness
              ? "replicate_suite: panel lacks high_openness flags"
              : "replicate_suite: panel lacks high_competitiveness flags");
    const char* prefix = menu.split == SampleSplit::Openness
                             ? "openness" : "competitiveness";
    const Panel high = subset_panel(panel, menu.split, true);
    const Panel low = subset_panel(panel, menu.split, false);
    for (LagMode lag : menu.lag_modes) {
      const std::string v = variant_name(lag);
      run_ladder(high, menu, lag, OutcomeVar::AccessOrdinal, v,
                 std::string("high_") + prefix, suite);
      run_ladder(low, menu, lag, OutcomeVar::AccessOrdinal, v,
                 std::string("low_") + prefix, suite);
      run_linear(low, menu, lag, v, std::string("low_") + prefix, suite);
    }
    return suite;
  }

  for (LagMode lag : menu.lag_modes) {
    run_ladder(panel, menu, lag, OutcomeVar::AccessOrdinal, variant_name(lag),
               "", suite);
    if (menu.dichotomous)
      run_ladder(panel, menu, lag, OutcomeVar::AccessBinary,
                 variant_name(lag) + "_binary", "", suite);
  }
  return suite;
}

std::string suite_to_csv(const SuiteResult& suite) {
  std::ostringstream out;
  out << "column,variant,subset,term,estimate,se,z,p,n_obs,n_clusters,error\n";
  for (const auto& cell : suite.cells) {
    auto prefix = [&] {
      return csv_quote(cell.column) + "," + cell.variant + "," + cell.subset +
             ",";
    };
    if (!cell.fit) {
      out << prefix() << ",,,,,," << csv_quote(cell.error) << "\n";
      continue;
    }
    const FitResult& fit = *cell.fit;
    for (size_t i = 0; i < fit.coef_names.size(); ++i) {
      const double b = fit.beta[static_cast<Eigen::Index>(i)];
      const double se = fit.se(static_cast<int>(i));
      const double z = se > 0.0 ? b / se : 0.0;
      const double p = se > 0.0 ? 2.0 * (1.0 - normal_cdf(std::fabs(z))) : 1.0;
      out << prefix() << fit.coef_names[i] << "," << format_g9(b) << ","
          << format_g9(se) << "," << format_g9(z) << "," << format_g9(p) << ","
          << fit.n_obs << "," << fit.n_clusters << ",\n";
    }
    out << prefix() << "wald_joint," << format_g9(fit.wald_joint.stat)
        << ",,," << format_g9(fit.wald_joint.p_value) << "," << fit.n_obs
        << "," << fit.n_clusters << ",\n";
    if (fit.has_peak) {
      out << prefix() << "peak," << format_g9(fit.peak) << ","
          << format_g9(fit.peak_se) << ",,," << fit.n_obs << ","
          << fit.n_clusters << ",\n";
      out << prefix() << "peak_percentile," << format_g9(fit.peak_percentile)
          << ",,,," << fit.n_obs << "," << fit.n_clusters << ",\n";
    }
  }
  return out.str();
}

namespace {

nlohmann::json fit_to_json(const FitResult& fit) {
  nlohmann::json j;
  j["coef_names"] = fit.coef_names;
  j["beta"] = std::vector<double>(fit.beta.data(),
                                  fit.beta.data() + fit.beta.size());
  std::vector<std::vector<double>> vcov(fit.vcov.rows());
  for (Eigen::Index i = 0; i < fit.vcov.rows(); ++i)
    vcov[i] = std::vector<double>(fit.vcov.row(i).begin(),
                                  fit.vcov.row(i).end());
  j["vcov"] = vcov;
  j["vcov_kind"] = fit.vcov_kind;
  j["n_obs"] = fit.n_obs;
  j["n_clusters"] = fit.n_clusters;
  j["n_absorbed"] = fit.n_absorbed;
  j["n_singletons_dropped"] = fit.n_singletons_dropped;
  j["dropped"] = fit.dropped;
  j["wald_joint"] = {{"stat", fit.wald_joint.stat},
                     {"p_value", fit.wald_joint.p_value},
                     {"df", fit.wald_joint.df},
                     {"f_reference", fit.wald_joint.f_reference}};
  if (fit.has_peak) {
    j["peak"] = fit.peak;
    j["peak_se"] = fit.peak_se;
    j["peak_percentile"] = fit.peak_percentile;
  }
  if (fit.first_stage_F.size() > 0)
    j["first_stage_F"] = std::vector<double>(
        fit.first_stage_F.data(),
        fit.first_stage_F.data() + fit.first_stage_F.size());
  return j;
}

nlohmann::json fe_toggles(const RegressionSpec& spec) {
  return {{"country_fe", spec.fe_country || spec.fe_country_period},
          {"period_fe", spec.fe_period || spec.fe_country_period},
          {"country_period_fe", spec.fe_country_period},
          {"group_fe", spec.fe_group},
          {"group_trends", spec.group_trends}};
}

}  // namespace

std::string suite_to_json(const SuiteResult& suite) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : suite.cells) {
    nlohmann::json j{{"column", cell.column},
                     {"variant", cell.variant},
                     {"subset", cell.subset},
                     {"fixed_effects", fe_toggles(cell.spec)}};
    if (cell.fit) j["fit"] = fit_to_json(*cell.fit);
    else j["error"] = cell.error;
    cells.push_back(j);
  }
  return nlohmann::json{{"cells", cells}}.dump(2);
}

namespace {

std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

}  // namespace

std::string suite_to_text(const SuiteResult& suite) {
  std::ostringstream out;
  for (const auto& cell : suite.cells) {
    out << cell.column;
    if (!cell.variant.empty()) out << " [" << cell.variant << "]";
    if (!cell.subset.empty()) out << " {" << cell.subset << "}";
    out << "\n";
    if (!cell.fit) {
      out << "  failed: " << cell.error << "\n\n";
      continue;
    }
    const FitResult& fit = *cell.fit;
    for (size_t i = 0; i < fit.coef_names.size(); ++i) {
      const double b = fit.beta[static_cast<Eigen::Index>(i)];
      const double se = fit.se(static_cast<int>(i));
      const double z = se > 0.0 ? b / se : 0.0;
      const double p = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
      char line[160];
      std::snprintf(line, sizeof(line), "  %-16s %10.4f%-3s (%.4f)",
                    fit.coef_names[i].c_str(), b, stars(p).c_str(), se);
      out << line << "\n";
    }
    out << "  joint Wald p = " << format_g9(fit.wald_joint.p_value);
    if (fit.has_peak)
      out << ", peak = " << format_g9(fit.peak) << " (pct "
          << format_g9(fit.peak_percentile) << ")";
    out << "\n  n = " << fit.n_obs << ", clusters = " << fit.n_clusters
        << ", absorbed = " << fit.n_absorbed << " [" << fit.vcov_kind << "]\n";
    const auto fe = fe_toggles(cell.spec);
    out << "  FE: country " << (fe["country_fe"].get<bool>() ? "Y" : "N")
        << ", period " << (fe["period_fe"].get<bool>() ? "Y" : "N")
        << ", country x period "
        << (fe["country_period_fe"].get<bool>() ? "Y" : "N") << ", group "
        << (fe["group_fe"].get<bool>() ? "Y" : "N") << ", trends "
        << (fe["group_trends"].get<bool>() ? "Y" : "N") << "\n\n";
  }
  return out.str();
}

std::string suite_text_from_json(const std::string& json_text) {
  const nlohmann::json root = nlohmann::json::parse(json_text);
  std::ostringstream out;
  for (const auto& cell : root.at("cells")) {
    out << cell.at("column").get<std::string>();
    if (cell.contains("variant") && !cell["variant"].get<std::string>().empty())
      out << " [" << cell["variant"].get<std::string>() << "]";
    if (cell.contains("subset") && !cell["subset"].get<std::string>().empty())
      out << " {" << cell["subset"].get<std::string>() << "}";
    out << "\n";
    if (cell.contains("error")) {
      out << "  failed: " << cell["error"].get<std::string>() << "\n\n";
      continue;
    }
    const auto& fit = cell.at("fit");
    const auto names = fit.at("coef_names").get<std::vector<std::string>>();
    const auto beta = fit.at("beta").get<std::vector<double>>();
    const auto vcov = fit.at("vcov").get<std::vector<std::vector<double>>>();
    for (size_t i = 0; i < names.size(); ++i) {
      const double se = std::sqrt(vcov[i][i]);
      const double z = se > 0.0 ? beta[i] / se : 0.0;
      const double p = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
      char line[160];
      std::snprintf(line, sizeof(line), "  %-16s %10.4f%-3s (%.4f)",
                    names[i].c_str(), beta[i], stars(p).c_str(), se);
      out << line << "\n";
    }
    out << "  joint Wald p = "
        << format_g9(fit.at("wald_joint").at("p_value").get<double>());
    if (fit.contains("peak"))
      out << ", peak = " << format_g9(fit["peak"].get<double>());
    out << "\n  n = " << fit.at("n_obs").get<int>() << ", clusters = "
        << fit.at("n_clusters").get<int>() << "\n\n";
  }
  return out.str();
}

FigureData figure_scatter(const Panel& panel, const SuiteResult& suite,
                          const std::string& subset) {
  FigureData fig;
  for (const auto& r : panel.rows) {
    fig.size.push_back(r.size);
    fig.access.push_back(r.access);
  }
  for (const auto& cell : suite.cells) {
    if (cell.subset != subset || !cell.fit) continue;
    const FitResult& fit = *cell.fit;
    const int i0 = fit.coef_index("const");
    const int i1 = fit.coef_index("size");
    const int i2 = fit.coef_index("size_sq");
    if (i1 < 0 || i2 < 0) continue;
    const double a = i0 >= 0 ? fit.beta[i0] : 0.0;
    const double b1 = fit.beta[i1];
    const double b2 = fit.beta[i2];
    for (int k = 0; k <= 200; ++k) {
      const double x = static_cast<double>(k) / 200.0;
      fig.curve_x.push_back(x);
      fig.curve_y.push_back(a + b1 * x + b2 * x * x);
    }
    break;  // first usable cell: the no-FE column
  }
  return fig;
}

std::string figure_to_csv(const FigureData& fig) {
  std::ostringstream out;
  out << "kind,x,y\n";
  for (size_t i = 0; i < fig.size.size(); ++i)
    out << "point," << format_g9(fig.size[i]) << ","
        << format_g9(fig.access[i]) << "\n";
  for (size_t i = 0; i < fig.curve_x.size(); ++i)
    out << "curve," << format_g9(fig.curve_x[i]) << ","
        << format_g9(fig.curve_y[i]) << "\n";
  return out.str();
}

}  // namespace powershare
