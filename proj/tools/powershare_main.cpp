// powershare CLI: model sweeps, synthetic panels, EPR/Polity ingestion,
// estimation suites, and report rendering.
//
// Exit codes: 0 success, 2 parameter/validation error, 3 schema/IO error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "powershare/csv.hpp"
#include "powershare/ingest.hpp"
#include "powershare/model.hpp"
#include "powershare/panel.hpp"
#include "powershare/regress.hpp"
#include "powershare/replicate.hpp"
#include "powershare/svg.hpp"
#include "powershare/synth.hpp"

namespace fs = std::filesystem;
using namespace powershare;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << text;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "delta,f,h,p1,payoff_share,payoff_limit,grants_access\n";
  for (Eigen::Index i = 0; i < r.delta.size(); ++i) {
    out << format_g9(r.delta[i]) << ',' << format_g9(r.f[i]) << ','
        << format_g9(r.h[i]) << ',' << format_g9(r.p1[i]) << ','
        << format_g9(r.payoff_share[i]) << ',' << format_g9(r.payoff_limit[i])
        << ',' << (r.grants_access[i] ? 1 : 0) << "\n";
  }
  return out.str();
}

void sweep_svg(const SweepResult& r, const ModelParams<double>& params,
               const fs::path& path) {
  SvgPlot plot("sharing gain vs group-2 size", "delta", "f / h");
  std::vector<double> xs(r.delta.data(), r.delta.data() + r.delta.size());
  std::vector<double> fs_(r.f.data(), r.f.data() + r.f.size());
  std::vector<double> hs(r.h.data(), r.h.data() + r.h.size());
  // shade maximal runs where access is granted
  Eigen::Index i = 0;
  while (i < r.delta.size()) {
    if (r.grants_access[i]) {
      Eigen::Index j = i;
      while (j + 1 < r.delta.size() && r.grants_access[j + 1]) ++j;
      plot.add_region(r.delta[i], r.delta[j], "#7fbf7f");
      i = j + 1;
    } else {
      ++i;
    }
  }
  plot.add_hline(0.0, "#999999");
  plot.add_line(xs, fs_, "#1f77b4");
  if (params.gamma != 1.0) plot.add_line(xs, hs, "#d62728");
  plot.write(path.string());
}

int run_sweep(const std::string& out_dir, double lambda, double a1,
              double gamma, int grid_n, bool want_thresholds, bool want_svg) {
  ModelParams<double> params;
  params.lambda = lambda;
  params.a1 = a1;
  params.gamma = gamma;
  params.validate();

  if (want_thresholds && !assumption_holds(params))
    throw std::invalid_argument(
        "thresholds requested but lambda/(1-lambda) > a1 fails");

  if (grid_n < 1) throw std::invalid_argument("grid must have >= 1 point");
  Eigen::ArrayXd grid(grid_n);
  for (int i = 0; i < grid_n; ++i)
    grid[i] = (i + 1.0) / (grid_n + 1.0);  // strictly inside (0,1)

  const SweepResult result = sweep(params, grid);
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "sweep.csv", sweep_csv(result));
  if (want_svg) sweep_svg(result, params, fs::path(out_dir) / "sweep.svg");

  if (want_thresholds) {
    const auto t = thresholds(params);
    std::ostringstream out;
    out << "delta_star," << format_g9(t.delta_star) << "\n";
    out << "delta_bar," << format_g9(t.delta_bar) << "\n";
    out << "gamma_star," << format_g9(t.gamma_star) << "\n";
    write_text(fs::path(out_dir) / "thresholds.csv", out.str());
    std::cout << "delta_star=" << format_g9(t.delta_star)
              << " delta_bar=" << format_g9(t.delta_bar)
              << " gamma_star=" << format_g9(t.gamma_star) << "\n";
  }
  std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << " ("
            << grid_n << " rows)\n";
  return 0;
}

LagMode parse_lag_mode(const std::string& s) {
  if (s == "none") return LagMode::Contemporaneous;
  if (s == "lag") return LagMode::LaggedRegressors;
  if (s == "iv") return LagMode::IvLagged;
  throw std::invalid_argument("unknown lag mode " + s);
}

void figure_svg(const FigureData& fig, const std::string& title,
                const fs::path& path) {
  SvgPlot plot(title, "relative size", "access to power");
  plot.add_points(fig.size, fig.access, "#1f77b4", 2.0, 0.35);
  if (!fig.curve_x.empty()) plot.add_line(fig.curve_x, fig.curve_y, "#d62728");
  plot.write(path.string());
}

int run_replicate(const std::string& panel_path, const std::string& out_dir,
                  const std::string& lag_mode_flag, const std::string& split,
                  bool ladder, bool dichotomous, bool presence,
                  bool cluster_correction) {
  const Panel panel = load_panel_csv(panel_path);
  panel.validate();

  SuiteMenu menu;
  menu.lag_modes.clear();
  if (lag_mode_flag == "all") {
    menu.lag_modes = {LagMode::Contemporaneous, LagMode::LaggedRegressors,
                      LagMode::IvLagged};
  } else {
    menu.lag_modes.push_back(parse_lag_mode(lag_mode_flag));
  }
  (void)ladder;  // the ladder is always run; flag kept for interface parity
  menu.dichotomous = dichotomous;
  menu.presence_abroad = presence;
  menu.cluster_correction = cluster_correction;
  if (split == "openness") menu.split = SampleSplit::Openness;
  else if (split == "competitiveness") menu.split = SampleSplit::Competitiveness;
  else if (split != "none") throw std::invalid_argument("unknown split " + split);

  const SuiteResult suite = replicate_suite(panel, menu);
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "results.csv", suite_to_csv(suite));
  write_text(fs::path(out_dir) / "report.json", suite_to_json(suite));
  write_text(fs::path(out_dir) / "report.txt", suite_to_text(suite));

  if (menu.split == SampleSplit::None) {
    const FigureData fig = figure_scatter(panel, suite);
    write_text(fs::path(out_dir) / "figure_scatter.csv", figure_to_csv(fig));
    figure_svg(fig, "size vs access", fs::path(out_dir) / "figure_scatter.svg");
  } else {
    for (const char* subset :
         {menu.split == SampleSplit::Openness ? "high_openness"
                                              : "high_competitiveness",
          menu.split == SampleSplit::Openness ? "low_openness"
                                              : "low_competitiveness"}) {
      Panel sub;
      const bool high = std::string(subset).rfind("high_", 0) == 0;
      for (const auto& r : panel.rows) {
        const double flag = menu.split == SampleSplit::Openness
                                ? r.high_openness
                                : r.high_competitiveness;
        if (!is_missing(flag) && (flag > 0.5) == high) sub.rows.push_back(r);
      }
      const FigureData fig = figure_scatter(sub, suite, subset);
      write_text(fs::path(out_dir) / (std::string("figure_") + subset + ".csv"),
                 figure_to_csv(fig));
      figure_svg(fig, subset,
                 fs::path(out_dir) / (std::string("figure_") + subset + ".svg"));
    }
  }

  int failed = 0;
  for (const auto& cell : suite.cells)
    if (!cell.fit) ++failed;
  std::cout << "suite: " << suite.cells.size() << " cells, " << failed
            << " failed (failures reported in-table)\n";
  std::cout << "wrote " << (fs::path(out_dir) / "results.csv").string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power-sharing contest model and panel estimation pipeline"};
  app.require_subcommand(1);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate f/h on a delta grid");
  double lambda = 0.5, a1 = 0.1, gamma = 1.0;
  int grid_n = 1001;
  bool want_thresholds = false, want_svg = false;
  std::string out_dir = "out";
  sweep_cmd->add_option("--lambda", lambda, "destruction sensitivity in (0,1)");
  sweep_cmd->add_option("--a1", a1, "group-1 coordination advantage >= 0");
  sweep_cmd->add_option("--gamma", gamma, "institutional openness in [0,1]");
  sweep_cmd->add_option("--grid", grid_n, "number of interior grid points");
  sweep_cmd->add_flag("--thresholds", want_thresholds,
                      "also compute delta*, delta-bar, gamma*");
  sweep_cmd->add_flag("--svg", want_svg, "emit sweep.svg");
  sweep_cmd->add_option("--out", out_dir, "output directory");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic panel");
  SynthConfig cfg;
  std::string mode = "model";
  std::string groups_spec = "1:4";
  synth_cmd->add_option("--countries", cfg.n_countries, "number of countries");
  synth_cmd->add_option("--groups", groups_spec, "groups per country (N or MIN:MAX)");
  synth_cmd->add_option("--periods", cfg.n_periods, "number of periods");
  synth_cmd->add_option("--mode", mode, "model | quadratic");
  synth_cmd->add_option("--beta1", cfg.beta1, "quadratic-mode beta1");
  synth_cmd->add_option("--beta2", cfg.beta2, "quadratic-mode beta2");
  synth_cmd->add_option("--sigma", cfg.noise_sigma, "latent shock scale");
  synth_cmd->add_option("--seed", cfg.seed, "deterministic seed");
  double opt_lambda = -1.0, opt_a1 = -1.0, opt_gamma = -1.0;
  synth_cmd->add_option("--lambda", opt_lambda, "pin lambda (default 0.5)");
  synth_cmd->add_option("--a1", opt_a1, "pin a1 (default 0.1)");
  synth_cmd->add_option("--gamma", opt_gamma, "pin gamma (default 1)");
  synth_cmd->add_option("--fe-country-period", cfg.fe_country_period_sigma,
                        "country-period FE sd (quadratic mode)");
  synth_cmd->add_option("--fe-group", cfg.fe_group_sigma,
                        "group FE sd (quadratic mode)");
  std::string synth_out = "out";
  synth_cmd->add_option("--out", synth_out, "output directory");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "build a panel from EPR/Polity CSVs");
  std::string epr_path, polity_path;
  int freq = 10;
  std::string agg = "mean", outcome = "ordinal";
  bool restrict_sample = false, drop_irrelevant = false;
  std::map<std::string, std::string> col_overrides;
  ingest_cmd->add_option("--epr", epr_path, "EPR Core CSV")->required();
  ingest_cmd->add_option("--polity", polity_path, "Polity CSV (optional)");
  ingest_cmd->add_option("--freq", freq, "panel frequency: 10 or 5");
  ingest_cmd->add_option("--agg", agg, "aggregation: mean | first");
  ingest_cmd->add_option("--outcome", outcome, "ordinal | binary (recorded in both cases)");
  ingest_cmd->add_flag("--restrict", restrict_sample,
                       "keep rows with aggregated access <= 2");
  ingest_cmd->add_flag("--drop-irrelevant", drop_irrelevant,
                       "drop annual rows with irrelevant status");
  ingest_cmd->add_option("--col", col_overrides,
                         "column override role=header (repeatable)");
  std::string ingest_out = "out";
  ingest_cmd->add_option("--out", ingest_out, "output directory");

  // estimate / replicate share the implementation
  std::string panel_path, lag_mode_flag = "none", split = "none";
  bool ladder = false, dichotomous = false, presence = false,
       cluster_correction = false;
  auto add_estimation_flags = [&](CLI::App* cmd) {
    cmd->add_option("--panel", panel_path, "panel CSV from ingest or synth")
        ->required();
    cmd->add_option("--lag-mode", lag_mode_flag, "none | lag | iv | all");
    cmd->add_option("--split", split, "none | openness | competitiveness");
    cmd->add_flag("--spec-ladder", ladder, "run the five-column FE ladder");
    cmd->add_flag("--dichotomous", dichotomous, "add binary-outcome ladder");
    cmd->add_flag("--presence", presence, "control for presence abroad");
    cmd->add_flag("--cluster-correction", cluster_correction,
                  "finite-sample CR0 scaling");
    cmd->add_option("--out", out_dir, "output directory");
  };
  auto* estimate_cmd = app.add_subcommand("estimate", "fit the specification ladder");
  add_estimation_flags(estimate_cmd);
  auto* replicate_cmd =
      app.add_subcommand("replicate", "ladder plus robustness outputs");
  add_estimation_flags(replicate_cmd);

  // report
  auto* report_cmd = app.add_subcommand("report", "render report.json as text");
  std::string report_path;
  report_cmd->add_option("--report", report_path, "report.json path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sweep_cmd->parsed())
      return run_sweep(out_dir, lambda, a1, gamma, grid_n, want_thresholds,
                       want_svg);

    if (synth_cmd->parsed()) {
      if (mode == "model") cfg.mode = DgpMode::Model;
      else if (mode == "quadratic") cfg.mode = DgpMode::Quadratic;
      else throw std::invalid_argument("unknown mode " + mode);
      const auto colon = groups_spec.find(':');
      if (colon == std::string::npos) {
        cfg.groups_min = cfg.groups_max = std::stoi(groups_spec);
      } else {
        cfg.groups_min = std::stoi(groups_spec.substr(0, colon));
        cfg.groups_max = std::stoi(groups_spec.substr(colon + 1));
      }
      if (opt_lambda >= 0.0) cfg.lambda = {opt_lambda, opt_lambda};
      if (opt_a1 >= 0.0) cfg.a1 = {opt_a1, opt_a1};
      if (opt_gamma >= 0.0) cfg.gamma = {opt_gamma, opt_gamma};
      const SynthPanel sp = generate(cfg);
      fs::create_directories(synth_out);
      write_panel_csv(sp.panel, (fs::path(synth_out) / "panel.csv").string());
      write_text(fs::path(synth_out) / "truth.json", truth_to_json(sp));
      std::cout << "wrote " << (fs::path(synth_out) / "panel.csv").string()
                << " (" << sp.panel.rows.size() << " rows)\n";
      return 0;
    }

    if (ingest_cmd->parsed()) {
      PanelBuildOptions options;
      options.frequency = freq;
      options.aggregation = agg == "first"
                                ? PanelBuildOptions::Aggregation::FirstObservation
                                : PanelBuildOptions::Aggregation::Mean;
      if (agg != "first" && agg != "mean")
        throw std::invalid_argument("unknown aggregation " + agg);
      if (outcome != "ordinal" && outcome != "binary")
        throw std::invalid_argument("unknown outcome " + outcome);
      options.restrict_score_leq_2 = restrict_sample;
      options.drop_irrelevant = drop_irrelevant;

      ColumnOverrides overrides;
      overrides.map = col_overrides;
      IngestWarnings warnings;
      const auto records = read_epr_csv(epr_path, overrides, true, &warnings);
      const auto annual = expand_years(records, &warnings);

      // validation statistics come from the unrestricted build
      PanelBuildOptions unrestricted = options;
      unrestricted.restrict_score_leq_2 = false;
      const Panel full = build_panel(annual, unrestricted);
      const ValidationReport report = validate_dataset(full);

      Panel panel = restrict_sample ? build_panel(annual, options) : full;
      if (!polity_path.empty()) {
        const auto polity = read_polity_csv(polity_path, overrides);
        attach_openness(panel, polity, options, &warnings);
      }

      fs::create_directories(ingest_out);
      write_panel_csv(panel, (fs::path(ingest_out) / "panel.csv").string());
      write_text(fs::path(ingest_out) / "validation.txt", report.to_text());
      write_text(fs::path(ingest_out) / "validation.json", report.to_json());
      std::cout << report.to_text();
      if (warnings.unknown_status_dropped > 0)
        std::cout << "warning: dropped " << warnings.unknown_status_dropped
                  << " records with status outside the Table-1 set\n";
      if (warnings.span_outside_range > 0)
        std::cout << "warning: " << warnings.span_outside_range
                  << " spans outside 1946-2017\n";
      if (warnings.countries_missing_polity > 0)
        std::cout << "warning: " << warnings.countries_missing_polity
                  << " countries lack polity coverage\n";
      std::cout << "wrote " << (fs::path(ingest_out) / "panel.csv").string()
                << " (" << panel.rows.size() << " rows)\n";
      return 0;
    }

    if (estimate_cmd->parsed() || replicate_cmd->parsed())
      return run_replicate(panel_path, out_dir, lag_mode_flag, split, ladder,
                           dichotomous, presence, cluster_correction);

    if (report_cmd->parsed()) {
      std::ifstream in(report_path, std::ios::binary);
      if (!in) throw SchemaError("cannot open " + report_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      std::cout << suite_text_from_json(buf.str());
      return 0;
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
