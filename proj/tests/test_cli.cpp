// End-to-end checks of the CLI: exit codes, output files, determinism.
// The binary path arrives via the POWERSHARE_CLI environment variable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "powershare/csv.hpp"
#include "powershare/panel.hpp"

namespace fs = std::filesystem;
using namespace powershare;

namespace {

std::string cli() {
  const char* path = std::getenv("POWERSHARE_CLI");
  REQUIRE_MESSAGE(path != nullptr, "POWERSHARE_CLI not set");
  return path;
}

struct RunResult {
  int exit_code;
  std::string output;   // stdout + stderr
};

RunResult run(const std::string& args) {
  const std::string log = (fs::temp_directory_path() / "ps_cli_log").string();
  const std::string cmd = cli() + " " + args + " > " + log + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::ostringstream buf;
  buf << in.rdbuf();
  return {WEXITSTATUS(raw), buf.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), p.string(), " missing");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("sweep emits the decision boundary at 0.9") {
  const fs::path dir = fresh_dir("ps_sweep");
  const RunResult r = run("sweep --lambda 0.5 --a1 0.1 --gamma 1.0 --grid 999 "
                          "--thresholds --out " + dir.string());
  CHECK(r.exit_code == 0);

  const CsvTable table = read_csv((dir / "sweep.csv").string());
  REQUIRE(table.header.size() == 7);
  CHECK(table.header[0] == "delta");
  CHECK(table.header[6] == "grants_access");
  REQUIRE(table.rows.size() == 999);
  double boundary = -1.0;
  for (size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i - 1][6] == "1" && table.rows[i][6] == "0")
      boundary = std::stod(table.rows[i][0]);
  }
  CHECK(boundary == doctest::Approx(0.9).epsilon(0.01));

  const std::string thresholds = slurp(dir / "thresholds.csv");
  CHECK(thresholds.find("delta_bar,0.9") != std::string::npos);
}

TEST_CASE("sweep rejects a violated assumption with exit 2") {
  const fs::path dir = fresh_dir("ps_sweep_bad");
  const RunResult r =
      run("sweep --lambda 0.5 --a1 1.0 --thresholds --out " + dir.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("lambda/(1-lambda) > a1") != std::string::npos);
}

TEST_CASE("single-point grid yields a single row") {
  const fs::path dir = fresh_dir("ps_sweep_one");
  const RunResult r = run("sweep --grid 1 --out " + dir.string());
  CHECK(r.exit_code == 0);
  const CsvTable table = read_csv((dir / "sweep.csv").string());
  CHECK(table.rows.size() == 1);
}

TEST_CASE("svg output is standalone") {
  const fs::path dir = fresh_dir("ps_sweep_svg");
  const RunResult r = run("sweep --grid 101 --svg --gamma 0.5 --out " +
                          dir.string());
  CHECK(r.exit_code == 0);
  const std::string svg = slurp(dir / "sweep.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("synth is deterministic per seed") {
  const fs::path a = fresh_dir("ps_synth_a");
  const fs::path b = fresh_dir("ps_synth_b");
  const std::string flags =
      "synth --countries 10 --groups 1:3 --periods 5 --seed 99 --out ";
  CHECK(run(flags + a.string()).exit_code == 0);
  CHECK(run(flags + b.string()).exit_code == 0);
  CHECK(slurp(a / "panel.csv") == slurp(b / "panel.csv"));
  CHECK(slurp(a / "truth.json") == slurp(b / "truth.json"));

  const fs::path c = fresh_dir("ps_synth_c");
  CHECK(run("synth --countries 10 --groups 1:3 --periods 5 --seed 100 --out " +
            c.string())
            .exit_code == 0);
  CHECK(slurp(a / "panel.csv") != slurp(c / "panel.csv"));
}

TEST_CASE("synth then replicate recovers a quadratic truth") {
  const fs::path dir = fresh_dir("ps_e2e");
  const RunResult gen = run(
      "synth --mode quadratic --countries 60 --groups 2:4 --periods 8 "
      "--beta1 2 --beta2 -2 --sigma 0.3 --seed 7 --out " + dir.string());
  REQUIRE(gen.exit_code == 0);

  const RunResult est = run("replicate --panel " +
                            (dir / "panel.csv").string() + " --spec-ladder "
                            "--out " + dir.string());
  REQUIRE_MESSAGE(est.exit_code == 0, est.output);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "figure_scatter.csv"));
  CHECK(fs::exists(dir / "figure_scatter.svg"));

  // peak near 0.5 in the results table
  const CsvTable results = read_csv((dir / "results.csv").string());
  bool peak_found = false;
  for (const auto& row : results.rows) {
    if (row[3] == "peak" && row[0].rfind("(1)", 0) == 0) {
      peak_found = true;
      CHECK(std::stod(row[4]) == doctest::Approx(0.5).epsilon(0.08));
    }
  }
  CHECK(peak_found);

  // report renders from JSON
  const RunResult rep =
      run("report --report " + (dir / "report.json").string());
  CHECK(rep.exit_code == 0);
  CHECK(rep.output.find("joint Wald p") != std::string::npos);
}

TEST_CASE("replicate without required flags fails with exit 3 on schema") {
  const fs::path dir = fresh_dir("ps_schema");
  const RunResult gen =
      run("synth --countries 8 --periods 4 --seed 1 --out " + dir.string());
  REQUIRE(gen.exit_code == 0);

  const RunResult bad = run("replicate --panel " +
                            (dir / "panel.csv").string() +
                            " --split openness --out " + dir.string());
  CHECK(bad.exit_code == 3);
  CHECK(bad.output.find("error:") != std::string::npos);
  CHECK(bad.output.find("high_openness") != std::string::npos);

  const RunResult missing = run("replicate --panel " +
                                (dir / "nope.csv").string() + " --out " +
                                dir.string());
  CHECK(missing.exit_code == 3);
}

TEST_CASE("unknown flags are rejected") {
  const RunResult r = run("sweep --no-such-flag 1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("ingest builds a panel from fixture files") {
  const fs::path dir = fresh_dir("ps_ingest");
  {
    std::ofstream epr(dir / "epr.csv");
    epr << "gwid,from,to,group,gwgroupid,size,status\n";
    epr << "100,1946,1965,Alpha,1001,0.2,JUNIOR PARTNER\n";
    epr << "100,1946,1965,Beta,1002,0.3,POWERLESS\n";
    epr << "100,1966,1975,Beta,1002,0.35,STATE COLLAPSE\n";
    epr << "200,1946,1975,Alpha,2001,0.1,DISCRIMINATED\n";
    epr << "200,1946,1975,Gamma,2002,0.6,MONOPOLY\n";
    std::ofstream pol(dir / "polity.csv");
    pol << "ccode,year,xropen,xrcomp\n";
    for (int y = 1900; y <= 1980; ++y) {
      pol << "100," << y << ",4,2\n";
      pol << "200," << y << ",2,1\n";
    }
  }
  const RunResult r = run("ingest --epr " + (dir / "epr.csv").string() +
                          " --polity " + (dir / "polity.csv").string() +
                          " --restrict --out " + dir.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  CHECK(r.output.find("warning: dropped 1 records") != std::string::npos);

  const Panel panel = load_panel_csv((dir / "panel.csv").string());
  panel.validate();
  for (const auto& r2 : panel.rows) {
    CHECK(r2.access <= 2.0);  // restricted sample
    CHECK(!is_missing(r2.high_openness));
  }
  // group 2002 (MONOPOLY, score 5) filtered by the restriction
  for (const auto& r2 : panel.rows) CHECK(r2.group_id != 2002);
  // presence abroad: Alpha exists in both countries
  bool alpha_has_presence = false;
  for (const auto& r2 : panel.rows)
    if (r2.group_id == 1001 && r2.presence_abroad > 0.0)
      alpha_has_presence = true;
  CHECK(alpha_has_presence);

  CHECK(fs::exists(dir / "validation.txt"));
  CHECK(fs::exists(dir / "validation.json"));

  const RunResult bad = run("ingest --epr " + (dir / "missing.csv").string() +
                            " --out " + dir.string());
  CHECK(bad.exit_code == 3);
}
