#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace policybound {

// Column-name mapping for long-format panel CSV. Every column not named
// here is loaded as a static unit covariate.
struct PanelSchema {
  std::string unit = "unit";
  std::string time = "time";
  std::string outcome = "outcome";
  std::string treatment = "m";
};

// Static unit covariate column. A column is numeric when every cell
// parses as a finite double; otherwise it is kept categorical.
struct CovariateColumn {
  std::string name;
  bool numeric = false;
  std::vector<double> values;        // per unit, numeric columns
  std::vector<std::string> labels;   // per unit, categorical columns
};

// Balanced unit x time outcome grid with a time-invariant multi-valued
// treatment code applied at the final period, the derived coarsened
// indicator A = 1(M > 0), and static unit covariates. Immutable after
// construction; all operations on it are pure, so instances are safe to
// share across threads.
class Panel {
 public:
  // Empty panel; meaningful instances come from the factories below.
  Panel() = default;

  // Parse, validate, and index a long-format CSV. Periods are re-indexed
  // to 1..T in increasing label order; original labels are kept for
  // serialization. Throws BalanceError / DuplicateError / SchemaError.
  static Panel from_csv(std::string_view csv_text,
                        const PanelSchema& schema = {});

  // Assemble a panel from already-validated columns (used by the
  // simulation engine and tests). outcomes is row-major unit x period.
  static Panel from_components(std::vector<std::string> units,
                               std::vector<long long> time_labels,
                               std::vector<double> outcomes,
                               std::vector<int> treatment,
                               std::vector<CovariateColumn> covariates);

  // Long-format CSV with the same column names; outcome cells rendered at
  // 17 significant digits so values round-trip bit-exactly.
  std::string to_csv(const PanelSchema& schema = {}) const;

  std::size_t n_units() const { return units_.size(); }
  int n_periods() const { return static_cast<int>(time_labels_.size()); }
  const std::vector<std::string>& units() const { return units_; }
  const std::vector<long long>& time_labels() const { return time_labels_; }

  std::size_t unit_index(std::string_view unit) const;  // throws DomainError

  // Outcome for period t in 1..T.
  double outcome(std::size_t unit, int t) const {
    return outcomes_[unit * time_labels_.size() +
                     static_cast<std::size_t>(t - 1)];
  }
  int treatment_code(std::size_t unit) const { return treatment_[unit]; }
  int coarsened(std::size_t unit) const { return coarsened_[unit]; }

  // Sorted distinct treatment codes present in the panel.
  std::vector<int> observed_codes() const;
  std::size_t count_code(int code) const;
  std::size_t count_treated() const;  // units with A = 1

  const std::vector<CovariateColumn>& covariates() const {
    return covariates_;
  }
  const CovariateColumn& covariate(std::string_view name) const;
  double numeric_covariate(std::size_t unit, std::string_view name) const;

  // Exact equality of two units on every named covariate column.
  bool covariates_match(std::size_t a, std::size_t b,
                        const std::vector<std::string>& columns) const;

  bool operator==(const Panel& other) const;

 private:
  void validate() const;
  void recompute_coarsened();

  std::vector<std::string> units_;
  std::vector<long long> time_labels_;
  std::vector<double> outcomes_;  // row-major unit x period
  std::vector<int> treatment_;
  std::vector<int> coarsened_;
  std::vector<CovariateColumn> covariates_;

  friend Panel derive_coarsened(const Panel& panel);
};

// Recompute A = 1(M > 0). Idempotent; panels built through the public
// constructors already carry it.
Panel derive_coarsened(const Panel& panel);

// Y_{i,t} - Y_{i,t-1}. Throws DomainError for t = 1.
double first_difference(const Panel& panel, std::size_t unit, int t);
double first_difference(const Panel& panel, std::string_view unit, int t);

// Pool target code meaning "all units with A = 1", used when a contrast
// runs on the coarsened indicator rather than a specific version.
inline constexpr int kTreatedArmCode = -1;

// Comparison units for one target unit: all other units carrying the
// target treatment code (or the treated arm as a whole) that exactly
// match the target on every filter column.
struct ComparatorPool {
  std::string target_unit;
  int target_code = 0;
  std::vector<std::size_t> members;
  std::vector<std::string> filter;
};

// Pool of units with the given treatment code. Empty match_columns keeps
// every carrier of the code. Throws EmptyPoolError when nothing survives
// the filter (callers may widen it).
ComparatorPool comparator_pool(const Panel& panel, std::string_view unit,
                               int target_code,
                               const std::vector<std::string>& match_columns);

// Coarsened-contrast pool: every unit in the arm opposite the target
// unit's A, optionally filtered by exact covariate match.
ComparatorPool opposite_arm_pool(const Panel& panel, std::string_view unit,
                                 const std::vector<std::string>& match_columns = {});
ComparatorPool opposite_arm_pool(const Panel& panel, std::size_t unit,
                                 const std::vector<std::string>& match_columns = {});

}  // namespace policybound
