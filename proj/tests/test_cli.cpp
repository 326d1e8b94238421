#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <cmath>

#include "app_panel.hpp"
#include "cli.hpp"
#include "policybound/csv.hpp"
#include "policybound/panel.hpp"

using namespace policybound;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("policybound_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

std::string source_path(const std::string& rel) {
  return std::string(POLICYBOUND_SOURCE_DIR) + "/" + rel;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) {
    n += c == '\n';
  }
  return n;
}

}  // namespace

TEST_CASE("dispatch usage errors exit 1") {
  CHECK(dispatch({}) == 1);
  CHECK(dispatch({"bogus"}) == 1);
  CHECK(dispatch({"simulate", "--no-such-flag"}) == 1);
  CHECK(dispatch({"bound"}) == 1);  // missing required flags
}

TEST_CASE("dispatch data errors exit 2") {
  TempDir dir;
  CHECK(dispatch({"bound", "--panel", dir.file("absent.csv"), "--out",
                  dir.file("o.csv")}) == 2);
  spit(dir.file("bad.csv"), "unit,time,outcome,m\na,1,1.0,0\n");
  CHECK(dispatch({"bound", "--panel", dir.file("bad.csv"), "--out",
                  dir.file("o.csv")}) == 2);
}

TEST_CASE("bound command emits bounds with multiplier dots") {
  TempDir dir;
  const std::string panel = source_path("data/application_panel.csv");
  const std::string out = dir.file("bounds.csv");
  const std::string json = dir.file("bounds.json");
  const std::string svg = dir.file("bounds.svg");
  REQUIRE(dispatch({"bound", "--panel", panel, "--z", "2", "--norm", "linf",
                    "--out", out, "--json", json, "--svg", svg}) == 0);

  const std::string csv = slurp(out);
  CHECK(csv.rfind("unit,point,lo,hi,sign,rule,strategy,lo_z1,hi_z1,lo_z1_5,"
                  "hi_z1_5,lo_z2,hi_z2",
                  0) == 0);
  CHECK(count_lines(csv) == 51);  // header + 50 states

  // Re-running is byte identical.
  const std::string again = dir.file("bounds3.csv");
  REQUIRE(dispatch({"bound", "--panel", panel, "--z", "2", "--norm", "linf",
                    "--out", again, "--json", dir.file("b3.json"), "--svg",
                    dir.file("b3.svg")}) == 0);
  CHECK(slurp(again) == csv);
  CHECK(slurp(dir.file("b3.svg")) == slurp(svg));

  const auto parsed = nlohmann::json::parse(slurp(json));
  CHECK(parsed.is_array());
  CHECK(parsed.size() == 50);
  CHECK(parsed[0].contains("sign"));

  CHECK(slurp(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("bound command supports coarsening strategies") {
  TempDir dir;
  // Two treated versions so union/assume strategies have content.
  std::string csv = "unit,time,outcome,m\n";
  const double paths[6][4] = {{1, 1.1, 1.2, 1.25}, {2, 2.1, 2.2, 2.2},
                              {0, 0.1, 0.2, 1.4},  {1, 1.2, 1.3, 2.5},
                              {3, 3.1, 3.2, 2.2},  {4, 4.1, 4.2, 3.1}};
  const int codes[6] = {0, 0, 1, 1, 2, 2};
  for (int i = 0; i < 6; ++i) {
    for (int t = 0; t < 4; ++t) {
      csv += "s" + std::to_string(i) + "," + std::to_string(t + 1) + "," +
             format_double(paths[i][t]) + "," + std::to_string(codes[i]) +
             "\n";
    }
  }
  spit(dir.file("panel.csv"), csv);
  for (const char* strategy :
       {"standard", "conservative", "assume_version", "union_over_versions"}) {
    const std::string out = dir.file(std::string("b_") + strategy + ".csv");
    CAPTURE(strategy);
    CHECK(dispatch({"bound", "--panel", dir.file("panel.csv"), "--strategy",
                    strategy, "--assume-version", "2", "--inflation", "1.5",
                    "--out", out}) == 0);
    CHECK(count_lines(slurp(out)) == 7);
  }
}

TEST_CASE("tipping command lists per-unit thresholds") {
  TempDir dir;
  const std::string out = dir.file("tipping.csv");
  REQUIRE(dispatch({"tipping", "--panel",
                    source_path("data/application_panel.csv"), "--out",
                    out}) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("unit,point,residual_norm,tipping_z", 0) == 0);
  CHECK(count_lines(csv) == 51);

  // Each exported threshold is |point| / norm, recomputed from the
  // exported columns themselves.
  const CsvTable parsed = parse_csv(csv);
  for (const auto& row : parsed.rows) {
    const double point = parse_double_field(row[1], "point");
    const double norm = parse_double_field(row[2], "residual_norm");
    const double z_star = parse_double_field(row[3], "tipping_z");
    REQUIRE(norm > 0.0);
    CHECK(z_star == doctest::Approx(std::fabs(point) / norm).epsilon(1e-12));
  }
}

TEST_CASE("robustness command reproduces the committed golden grid") {
  TempDir dir;
  const std::string out = dir.file("grid.csv");
  REQUIRE(dispatch({"robustness", "--panel",
                    source_path("data/application_panel.csv"), "--z", "2",
                    "--out", out, "--json", dir.file("grid.json")}) == 0);
  CHECK(slurp(out) == slurp(source_path("data/robustness_grid_golden.csv")));
  const auto parsed = nlohmann::json::parse(slurp(dir.file("grid.json")));
  CHECK(parsed["specifications"].size() == 8);
  CHECK(parsed["units"].size() == 50);
}

TEST_CASE("table command mirrors the average-effects layout") {
  TempDir dir;
  const std::string out = dir.file("table.csv");
  REQUIRE(dispatch({"table", "--panel",
                    source_path("data/application_panel.csv"), "--moderators",
                    "rural,pdmp_2013", "--out", out}) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("estimand,n,n_treated,estimate,std_error,ci_lo,ci_hi", 0) ==
        0);
  CHECK(count_lines(csv) == 10);  // overall + 2 + 2 x 3
  CHECK(csv.find("overall,50,26,") != std::string::npos);
  // The saturated PDMP stratum reports an estimate but no standard error.
  CHECK(csv.find("pdmp_2013=1,2,1,") != std::string::npos);
  // Empty cells remain for the empty stratum.
  CHECK(csv.find("pdmp_2013=1 & rural=1,0,0,,,,") != std::string::npos);
}

TEST_CASE("simulate command writes the table and json deterministically") {
  TempDir dir;
  const std::string out1 = dir.file("r1.csv");
  const std::string out2 = dir.file("r2.csv");
  REQUIRE(dispatch({"simulate", "--n", "15", "--reps", "8", "--seed", "5",
                    "--workers", "1", "--out", out1, "--json",
                    dir.file("r1.json")}) == 0);
  REQUIRE(dispatch({"simulate", "--n", "15", "--reps", "8", "--seed", "5",
                    "--workers", "4", "--out", out2}) == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(count_lines(slurp(out1)) == 11);
  const auto parsed = nlohmann::json::parse(slurp(dir.file("r1.json")));
  CHECK(parsed["reps"] == 8);
  CHECK(parsed["estimators"].size() == 5);
}

TEST_CASE("config file feeds flags and command line wins") {
  TempDir dir;
  spit(dir.file("sim.conf"),
       "n=15\nreps=6\nseed=9\nworkers=1\nout=" + dir.file("from_conf.csv") +
           "\n");
  REQUIRE(dispatch({"simulate", "--config", dir.file("sim.conf")}) == 0);
  CHECK(fs::exists(dir.file("from_conf.csv")));

  // Command line overrides the file: different reps land elsewhere.
  REQUIRE(dispatch({"simulate", "--config", dir.file("sim.conf"), "--reps",
                    "3", "--out", dir.file("over.csv"), "--json",
                    dir.file("over.json")}) == 0);
  const auto parsed = nlohmann::json::parse(slurp(dir.file("over.json")));
  CHECK(parsed["reps"] == 3);
}

TEST_CASE("illustrate command emits grid, scatter, metadata, and svg") {
  TempDir dir;
  REQUIRE(dispatch({"illustrate", "--seed", "3", "--n", "500", "--out-grid",
                    dir.file("g.csv"), "--out-scatter", dir.file("s.csv"),
                    "--meta", dir.file("m.json"), "--svg",
                    dir.file("c.svg")}) == 0);
  CHECK(count_lines(slurp(dir.file("s.csv"))) == 501);
  const auto meta = nlohmann::json::parse(slurp(dir.file("m.json")));
  CHECK(meta["sigma_xu"] == 0.25);
  CHECK(slurp(dir.file("c.svg")).rfind("<svg", 0) == 0);

  // Determinism across reruns.
  REQUIRE(dispatch({"illustrate", "--seed", "3", "--n", "500", "--out-grid",
                    dir.file("g2.csv"), "--out-scatter", dir.file("s2.csv")}) ==
          0);
  CHECK(slurp(dir.file("g2.csv")) == slurp(dir.file("g.csv")));
  CHECK(slurp(dir.file("s2.csv")) == slurp(dir.file("s.csv")));
}

TEST_CASE("bundled panel regenerates byte-identically from its seed") {
  const Panel regenerated = build_application_panel();
  CHECK(regenerated.to_csv() ==
        slurp(source_path("data/application_panel.csv")));
}
