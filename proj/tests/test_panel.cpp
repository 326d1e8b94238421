#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "policybound/csv.hpp"
#include "policybound/did.hpp"
#include "policybound/errors.hpp"
#include "policybound/panel.hpp"
#include "policybound/rng.hpp"

using namespace policybound;

namespace {

const std::string kTinyCsv =
    "unit,time,outcome,m\n"
    "a,1,1.0,0\n"
    "a,2,1.5,0\n"
    "a,3,2.0,0\n"
    "b,1,2.0,1\n"
    "b,2,2.5,1\n"
    "b,3,4.0,1\n";

std::string bundled_panel_path() {
  return std::string(POLICYBOUND_SOURCE_DIR) + "/data/application_panel.csv";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Random panel with a mix of numeric and categorical covariates; values
// span many magnitudes to stress the round-trip formatting.
Panel random_panel(Rng& rng, bool with_categorical = true) {
  const int n = 4 + static_cast<int>(rng.uniform() * 8);
  const int periods = 2 + static_cast<int>(rng.uniform() * 4);
  std::vector<std::string> units;
  std::vector<int> treatment;
  CovariateColumn num{"size", true, {}, {}};
  CovariateColumn cat{"region", false, {}, {}};
  const char* regions[] = {"north", "with,comma", "quo\"te", "pl ain"};
  for (int i = 0; i < n; ++i) {
    units.push_back("u" + std::to_string(i));
    treatment.push_back(i == 0 ? 0 : static_cast<int>(rng.uniform() * 3));
    num.values.push_back(rng.normal() * std::pow(10.0, rng.uniform() * 8 - 4));
    cat.labels.push_back(regions[static_cast<int>(rng.uniform() * 4)]);
  }
  treatment[n - 1] = std::max(treatment[n - 1], 1);  // both arms present
  std::vector<long long> labels;
  long long label = static_cast<long long>(rng.uniform() * 2000);
  for (int t = 0; t < periods; ++t) {
    label += 1 + static_cast<long long>(rng.uniform() * 3);
    labels.push_back(label);
  }
  std::vector<double> outcomes;
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < periods; ++t) {
      outcomes.push_back(rng.normal() * std::pow(10.0, rng.uniform() * 6 - 3));
    }
  }
  std::vector<CovariateColumn> covs = {num};
  if (with_categorical) {
    covs.push_back(cat);
  }
  return Panel::from_components(units, labels, outcomes, treatment, covs);
}

}  // namespace

TEST_CASE("load_panel reads a complete grid") {
  const Panel p = Panel::from_csv(kTinyCsv);
  CHECK(p.n_units() == 2);
  CHECK(p.n_periods() == 3);
  CHECK(p.outcome(p.unit_index("a"), 2) == 1.5);
  CHECK(p.treatment_code(p.unit_index("b")) == 1);
  CHECK(p.coarsened(p.unit_index("b")) == 1);
  CHECK(p.coarsened(p.unit_index("a")) == 0);
}

TEST_CASE("load_panel rejects bad inputs") {
  SUBCASE("missing cell names the hole") {
    std::string csv = kTinyCsv;
    csv.erase(csv.find("b,2,2.5,1\n"), 10);
    CHECK_THROWS_WITH_AS(Panel::from_csv(csv),
                         doctest::Contains("(b, 2)"), BalanceError);
  }
  SUBCASE("duplicate cell") {
    CHECK_THROWS_AS(Panel::from_csv(kTinyCsv + "a,3,9.0,0\n"), DuplicateError);
  }
  SUBCASE("non-integer treatment code") {
    std::string csv = kTinyCsv;
    const auto pos = csv.find("b,1,2.0,1");
    csv.replace(pos, 9, "b,1,2.0,x");
    CHECK_THROWS_AS(Panel::from_csv(csv), SchemaError);
  }
  SUBCASE("time-varying treatment is rejected") {
    std::string csv = kTinyCsv;
    const auto pos = csv.find("b,3,4.0,1");
    csv.replace(pos, 9, "b,3,4.0,2");
    CHECK_THROWS_AS(Panel::from_csv(csv), SchemaError);
  }
  SUBCASE("single period") {
    CHECK_THROWS_AS(Panel::from_csv("unit,time,outcome,m\na,1,1.0,0\n"),
                    SchemaError);
  }
  SUBCASE("missing covariate cell") {
    const std::string csv =
        "unit,time,outcome,m,z\n"
        "a,1,1.0,0,5\n"
        "a,2,1.0,0,\n"
        "b,1,1.0,1,3\n"
        "b,2,1.0,1,3\n";
    CHECK_THROWS_AS(Panel::from_csv(csv), SchemaError);
  }
  SUBCASE("time-varying covariate") {
    const std::string csv =
        "unit,time,outcome,m,z\n"
        "a,1,1.0,0,5\n"
        "a,2,1.0,0,6\n"
        "b,1,1.0,1,3\n"
        "b,2,1.0,1,3\n";
    CHECK_THROWS_AS(Panel::from_csv(csv), SchemaError);
  }
}

TEST_CASE("times are re-indexed but labels kept, row order irrelevant") {
  const std::string csv =
      "unit,time,outcome,m\n"
      "a,2014,5.0,0\n"
      "b,2009,1.0,1\n"
      "a,2009,4.0,0\n"
      "b,2014,2.0,1\n";
  const Panel p = Panel::from_csv(csv);
  CHECK(p.n_periods() == 2);
  CHECK(p.time_labels() == std::vector<long long>{2009, 2014});
  CHECK(p.outcome(p.unit_index("a"), 1) == 4.0);
  CHECK(p.outcome(p.unit_index("a"), 2) == 5.0);
}

TEST_CASE("serialize then load is the identity") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const Panel p = random_panel(rng);
    const Panel q = Panel::from_csv(p.to_csv());
    CHECK(q == p);
    CHECK(q.to_csv() == p.to_csv());
  }
}

TEST_CASE("derive_coarsened is the indicator of any treatment") {
  const std::string csv =
      "unit,time,outcome,m\n"
      "a,1,0,0\na,2,0,0\n"
      "b,1,0,1\nb,2,0,1\n"
      "c,1,0,2\nc,2,0,2\n";
  const Panel p = Panel::from_csv(csv);
  CHECK(p.coarsened(p.unit_index("a")) == 0);
  CHECK(p.coarsened(p.unit_index("b")) == 1);
  CHECK(p.coarsened(p.unit_index("c")) == 1);
  const Panel once = derive_coarsened(p);
  const Panel twice = derive_coarsened(once);
  CHECK(once == p);
  CHECK(twice == once);
}

TEST_CASE("first_difference basics") {
  const std::string csv =
      "unit,time,outcome,m\n"
      "a,1,3,0\na,2,5,0\n"
      "b,1,7,1\nb,2,7,1\n";
  const Panel p = Panel::from_csv(csv);
  CHECK(first_difference(p, "a", 2) == 2.0);
  CHECK(first_difference(p, "b", 2) == 0.0);
  CHECK_THROWS_AS(first_difference(p, "a", 1), DomainError);
  CHECK_THROWS_AS(first_difference(p, "a", 3), DomainError);
}

TEST_CASE("comparator pools filter and count correctly") {
  // 26 units: u0 treated (code 1), u1..u25 controls; binary covariate.
  std::string csv = "unit,time,outcome,m,flag\n";
  for (int i = 0; i < 26; ++i) {
    const int code = i == 0 ? 1 : 0;
    const int flag = (i % 8 == 1) ? 1 : 0;  // u1, u9, u17 share flag=1
    for (int t = 1; t <= 2; ++t) {
      csv += "u" + std::to_string(i) + "," + std::to_string(t) + ",1.0," +
             std::to_string(code) + "," + std::to_string(flag) + "\n";
    }
  }
  Panel p = Panel::from_csv(csv);

  const ComparatorPool all = comparator_pool(p, "u0", 0, {});
  CHECK(all.members.size() == 25);

  // u0 has flag 0; restrict to flag matches (u1, u9, u17, u25 carry 1).
  const ComparatorPool matched = comparator_pool(p, "u0", 0, {"flag"});
  CHECK(matched.members.size() == 21);

  const ComparatorPool same_flag = comparator_pool(p, "u1", 0, {"flag"});
  CHECK(same_flag.members.size() == 3);  // u9, u17, u25

  CHECK_THROWS_AS(comparator_pool(p, "u1", 2, {}), EmptyPoolError);

  // Cardinality property: |pool| = #carriers - (target carries code).
  for (const int code : {0, 1}) {
    for (const std::string unit : {"u0", "u1"}) {
      const std::size_t carriers = p.count_code(code);
      const bool self = p.treatment_code(p.unit_index(unit)) == code;
      if (carriers == (self ? 1u : 0u)) {
        continue;  // pool would be empty
      }
      const ComparatorPool pool = comparator_pool(p, unit, code, {});
      CHECK(pool.members.size() == carriers - (self ? 1 : 0));
    }
  }
}

TEST_CASE("opposite arm pool spans every positive code") {
  const std::string csv =
      "unit,time,outcome,m\n"
      "a,1,0,0\na,2,0,0\n"
      "b,1,0,1\nb,2,0,1\n"
      "c,1,0,2\nc,2,0,2\n";
  const Panel p = Panel::from_csv(csv);
  const ComparatorPool treated = opposite_arm_pool(p, "a");
  CHECK(treated.target_code == kTreatedArmCode);
  CHECK(treated.members.size() == 2);
  const ComparatorPool controls = opposite_arm_pool(p, "c");
  CHECK(controls.target_code == 0);
  CHECK(controls.members.size() == 1);
}

TEST_CASE("bundled application panel loads with the documented shape") {
  const std::string text = slurp(bundled_panel_path());
  const Panel p = Panel::from_csv(text);
  CHECK(p.n_units() == 50);
  CHECK(p.n_periods() == 6);
  CHECK(p.count_treated() == 26);
  CHECK(p.time_labels().front() == 2009);
  CHECK(p.time_labels().back() == 2014);

  // Spreadsheet-style oracle: recompute IL's final first difference from
  // the raw CSV text.
  const CsvTable raw = parse_csv(text);
  const std::size_t unit_col = raw.column("unit");
  const std::size_t time_col = raw.column("time");
  const std::size_t outcome_col = raw.column("outcome");
  double y2014 = 0.0;
  double y2013 = 0.0;
  for (const auto& row : raw.rows) {
    if (row[unit_col] == "IL" && row[time_col] == "2014") {
      y2014 = parse_double_field(row[outcome_col], "outcome");
    }
    if (row[unit_col] == "IL" && row[time_col] == "2013") {
      y2013 = parse_double_field(row[outcome_col], "outcome");
    }
  }
  CHECK(first_difference(p, "IL", 6) == doctest::Approx(y2014 - y2013)
                                            .epsilon(1e-15));

  // Group trend of the control arm at the final period, recomputed
  // independently from the raw rows.
  double control_trend = 0.0;
  int controls = 0;
  const std::size_t m_col = raw.column("m");
  for (const auto& row : raw.rows) {
    if (row[m_col] == "0" && row[time_col] == "2014") {
      double y14 = parse_double_field(row[outcome_col], "outcome");
      for (const auto& other : raw.rows) {
        if (other[unit_col] == row[unit_col] && other[time_col] == "2013") {
          control_trend += y14 - parse_double_field(other[outcome_col],
                                                    "outcome");
          ++controls;
        }
      }
    }
  }
  control_trend /= controls;
  const ComparatorPool control_pool = comparator_pool(p, "IL", 0, {});
  CHECK(group_trend(p, control_pool, 6) ==
        doctest::Approx(control_trend).epsilon(1e-12));

  // Matched pools implied by the PDMP history columns.
  const std::vector<std::string> history = {"pdmp_2013", "pdmp_2014"};
  const ComparatorPool wv = opposite_arm_pool(p, "WV", history);
  REQUIRE(wv.members.size() == 1);
  CHECK(p.units()[wv.members[0]] == "TN");
  const ComparatorPool ma = opposite_arm_pool(p, "MA", history);
  REQUIRE(ma.members.size() == 2);
  CHECK(p.units()[ma.members[0]] == "IN");
  CHECK(p.units()[ma.members[1]] == "LA");
}

TEST_CASE("csv writer quotes per rfc 4180") {
  const std::string out = write_csv({"a", "b"}, {{"x,y", "he said \"hi\""},
                                                 {"line\nbreak", "plain"}});
  CHECK(out ==
        "a,b\n\"x,y\",\"he said \"\"hi\"\"\"\n\"line\nbreak\",plain\n");
  const CsvTable parsed = parse_csv(out);
  CHECK(parsed.rows[0][0] == "x,y");
  CHECK(parsed.rows[0][1] == "he said \"hi\"");
  CHECK(parsed.rows[1][0] == "line\nbreak");
}

TEST_CASE("all-control panels load with a zero coarsened indicator") {
  const std::string csv =
      "unit,time,outcome,m\n"
      "a,1,1,0\na,2,2,0\n"
      "b,1,3,0\nb,2,4,0\n";
  const Panel p = Panel::from_csv(csv);
  CHECK(p.count_treated() == 0);
  CHECK(p.coarsened(0) == 0);
  CHECK(p.coarsened(1) == 0);
}
