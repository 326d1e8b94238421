#include "policybound/panel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "policybound/csv.hpp"
#include "policybound/errors.hpp"

namespace policybound {

Panel Panel::from_csv(std::string_view csv_text, const PanelSchema& schema) {
  const CsvTable table = parse_csv(csv_text);
  const std::size_t unit_col = table.column(schema.unit);
  const std::size_t time_col = table.column(schema.time);
  const std::size_t outcome_col = table.column(schema.outcome);
  const std::size_t treat_col = table.column(schema.treatment);

  std::vector<std::size_t> cov_cols;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != unit_col && j != time_col && j != outcome_col && j != treat_col) {
      cov_cols.push_back(j);
    }
  }

  Panel panel;

  // First pass: discover units (in first-appearance order) and the sorted
  // set of time labels.
  std::unordered_map<std::string, std::size_t> unit_of;
  std::set<long long> label_set;
  for (const auto& row : table.rows) {
    const std::string& u = row[unit_col];
    if (unit_of.emplace(u, panel.units_.size()).second) {
      panel.units_.push_back(u);
    }
    label_set.insert(parse_int_field(row[time_col], "time"));
  }
  panel.time_labels_.assign(label_set.begin(), label_set.end());
  const std::size_t n = panel.units_.size();
  const std::size_t t_count = panel.time_labels_.size();
  if (t_count < 2) {
    throw SchemaError("panel needs at least two periods, found " +
                      std::to_string(t_count));
  }
  std::unordered_map<long long, std::size_t> period_of;
  for (std::size_t t = 0; t < t_count; ++t) {
    period_of.emplace(panel.time_labels_[t], t);
  }

  // Second pass: fill the grid, treatment codes, and covariates, checking
  // duplicates and per-unit consistency as we go.
  const double nan = std::nan("");
  panel.outcomes_.assign(n * t_count, nan);
  panel.treatment_.assign(n, -1);
  panel.covariates_.resize(cov_cols.size());
  std::vector<std::vector<std::string>> cov_raw(
      cov_cols.size(), std::vector<std::string>(n));
  std::vector<char> cov_seen(n, 0);

  for (const auto& row : table.rows) {
    const std::size_t i = unit_of[row[unit_col]];
    const std::size_t t = period_of[parse_int_field(row[time_col], "time")];
    double& cell = panel.outcomes_[i * t_count + t];
    if (!std::isnan(cell)) {
      throw DuplicateError("duplicate cell (" + panel.units_[i] + ", " +
                           std::to_string(panel.time_labels_[t]) + ")");
    }
    cell = parse_double_field(row[outcome_col], "outcome");

    const long long code =
        parse_int_field(row[treat_col], "treatment code of " + panel.units_[i]);
    if (code < 0) {
      throw SchemaError("negative treatment code for unit " + panel.units_[i]);
    }
    if (panel.treatment_[i] == -1) {
      panel.treatment_[i] = static_cast<int>(code);
    } else if (panel.treatment_[i] != code) {
      throw SchemaError("treatment code of unit " + panel.units_[i] +
                        " varies over time; staggered adoption is not "
                        "supported");
    }

    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      const std::string& cell_text = row[cov_cols[k]];
      if (cell_text.empty()) {
        throw SchemaError("missing covariate '" + table.header[cov_cols[k]] +
                          "' for unit " + panel.units_[i]);
      }
      if (!cov_seen[i]) {
        cov_raw[k][i] = cell_text;
      } else if (cov_raw[k][i] != cell_text) {
        throw SchemaError("covariate '" + table.header[cov_cols[k]] +
                          "' of unit " + panel.units_[i] +
                          " varies over time; covariates must be static");
      }
    }
    cov_seen[i] = 1;
  }

  // Balance check: every (unit, time) cell must be present exactly once.
  std::string missing;
  std::size_t missing_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      if (std::isnan(panel.outcomes_[i * t_count + t])) {
        ++missing_count;
        if (missing_count <= 20) {
          if (!missing.empty()) {
            missing += ", ";
          }
          missing += "(" + panel.units_[i] + ", " +
                     std::to_string(panel.time_labels_[t]) + ")";
        }
      }
    }
  }
  if (missing_count > 0) {
    throw BalanceError("unbalanced panel, " + std::to_string(missing_count) +
                       " missing cell(s): " + missing +
                       (missing_count > 20 ? ", ..." : ""));
  }

  for (std::size_t k = 0; k < cov_cols.size(); ++k) {
    CovariateColumn& col = panel.covariates_[k];
    col.name = table.header[cov_cols[k]];
    col.numeric = std::all_of(cov_raw[k].begin(), cov_raw[k].end(),
                              [](const std::string& s) {
                                return looks_numeric(s);
                              });
    if (col.numeric) {
      col.values.reserve(n);
      for (const auto& s : cov_raw[k]) {
        col.values.push_back(parse_double_field(s, col.name));
      }
    } else {
      col.labels = std::move(cov_raw[k]);
    }
  }

  panel.recompute_coarsened();
  panel.validate();
  return panel;
}

Panel Panel::from_components(std::vector<std::string> units,
                             std::vector<long long> time_labels,
                             std::vector<double> outcomes,
                             std::vector<int> treatment,
                             std::vector<CovariateColumn> covariates) {
  Panel panel;
  panel.units_ = std::move(units);
  panel.time_labels_ = std::move(time_labels);
  panel.outcomes_ = std::move(outcomes);
  panel.treatment_ = std::move(treatment);
  panel.covariates_ = std::move(covariates);
  panel.recompute_coarsened();
  panel.validate();
  return panel;
}

void Panel::validate() const {
  const std::size_t n = units_.size();
  const std::size_t t_count = time_labels_.size();
  if (n == 0) {
    throw SchemaError("panel has no units");
  }
  if (t_count < 2) {
    throw SchemaError("panel needs at least two periods");
  }
  if (!std::is_sorted(time_labels_.begin(), time_labels_.end()) ||
      std::adjacent_find(time_labels_.begin(), time_labels_.end()) !=
          time_labels_.end()) {
    throw SchemaError("time labels must be strictly increasing");
  }
  if (outcomes_.size() != n * t_count || treatment_.size() != n ||
      coarsened_.size() != n) {
    throw SchemaError("panel component sizes are inconsistent");
  }
  for (double y : outcomes_) {
    if (!std::isfinite(y)) {
      throw SchemaError("non-finite outcome value");
    }
  }
  for (int m : treatment_) {
    if (m < 0) {
      throw SchemaError("negative treatment code");
    }
  }
  std::set<std::string> distinct(units_.begin(), units_.end());
  if (distinct.size() != n) {
    throw DuplicateError("duplicate unit identifiers");
  }
  for (const auto& col : covariates_) {
    const std::size_t len = col.numeric ? col.values.size() : col.labels.size();
    if (len != n) {
      throw SchemaError("covariate '" + col.name + "' length mismatch");
    }
    if (col.numeric) {
      for (double v : col.values) {
        if (!std::isfinite(v)) {
          throw SchemaError("non-finite covariate in '" + col.name + "'");
        }
      }
    }
  }
}

void Panel::recompute_coarsened() {
  coarsened_.resize(treatment_.size());
  for (std::size_t i = 0; i < treatment_.size(); ++i) {
    coarsened_[i] = treatment_[i] > 0 ? 1 : 0;
  }
}

std::string Panel::to_csv(const PanelSchema& schema) const {
  std::vector<std::string> header = {schema.unit, schema.time, schema.outcome,
                                     schema.treatment};
  for (const auto& col : covariates_) {
    header.push_back(col.name);
  }
  std::vector<std::vector<std::string>> rows;
  rows.reserve(units_.size() * time_labels_.size());
  for (std::size_t i = 0; i < units_.size(); ++i) {
    for (std::size_t t = 0; t < time_labels_.size(); ++t) {
      std::vector<std::string> row;
      row.reserve(header.size());
      row.push_back(units_[i]);
      row.push_back(std::to_string(time_labels_[t]));
      row.push_back(format_double(outcomes_[i * time_labels_.size() + t]));
      row.push_back(std::to_string(treatment_[i]));
      for (const auto& col : covariates_) {
        row.push_back(col.numeric ? format_double(col.values[i])
                                  : col.labels[i]);
      }
      rows.push_back(std::move(row));
    }
  }
  return write_csv(header, rows);
}

std::size_t Panel::unit_index(std::string_view unit) const {
  for (std::size_t i = 0; i < units_.size(); ++i) {
    if (units_[i] == unit) {
      return i;
    }
  }
  throw DomainError("unknown unit '" + std::string(unit) + "'");
}

std::vector<int> Panel::observed_codes() const {
  std::set<int> codes(treatment_.begin(), treatment_.end());
  return std::vector<int>(codes.begin(), codes.end());
}

std::size_t Panel::count_code(int code) const {
  return static_cast<std::size_t>(
      std::count(treatment_.begin(), treatment_.end(), code));
}

std::size_t Panel::count_treated() const {
  return static_cast<std::size_t>(
      std::count(coarsened_.begin(), coarsened_.end(), 1));
}

const CovariateColumn& Panel::covariate(std::string_view name) const {
  for (const auto& col : covariates_) {
    if (col.name == name) {
      return col;
    }
  }
  throw SchemaError("unknown covariate column '" + std::string(name) + "'");
}

double Panel::numeric_covariate(std::size_t unit, std::string_view name) const {
  const CovariateColumn& col = covariate(name);
  if (!col.numeric) {
    throw SchemaError("covariate '" + std::string(name) +
                      "' is categorical, expected numeric");
  }
  return col.values[unit];
}

bool Panel::covariates_match(std::size_t a, std::size_t b,
                             const std::vector<std::string>& columns) const {
  for (const auto& name : columns) {
    const CovariateColumn& col = covariate(name);
    if (col.numeric ? (col.values[a] != col.values[b])
                    : (col.labels[a] != col.labels[b])) {
      return false;
    }
  }
  return true;
}

bool Panel::operator==(const Panel& other) const {
  if (units_ != other.units_ || time_labels_ != other.time_labels_ ||
      treatment_ != other.treatment_ || coarsened_ != other.coarsened_ ||
      covariates_.size() != other.covariates_.size()) {
    return false;
  }
  if (outcomes_ != other.outcomes_) {
    return false;
  }
  for (std::size_t k = 0; k < covariates_.size(); ++k) {
    const auto& a = covariates_[k];
    const auto& b = other.covariates_[k];
    if (a.name != b.name || a.numeric != b.numeric || a.values != b.values ||
        a.labels != b.labels) {
      return false;
    }
  }
  return true;
}

Panel derive_coarsened(const Panel& panel) {
  Panel out = panel;
  out.recompute_coarsened();
  return out;
}

double first_difference(const Panel& panel, std::size_t unit, int t) {
  if (t < 2 || t > panel.n_periods()) {
    throw DomainError("first_difference: t must lie in 2..T");
  }
  return panel.outcome(unit, t) - panel.outcome(unit, t - 1);
}

double first_difference(const Panel& panel, std::string_view unit, int t) {
  return first_difference(panel, panel.unit_index(unit), t);
}

namespace {

ComparatorPool build_pool(const Panel& panel, std::size_t target, int code,
                          const std::vector<std::string>& match_columns,
                          bool treated_arm) {
  ComparatorPool pool;
  pool.target_unit = panel.units()[target];
  pool.target_code = treated_arm ? kTreatedArmCode : code;
  pool.filter = match_columns;
  for (std::size_t j = 0; j < panel.n_units(); ++j) {
    if (j == target) {
      continue;
    }
    const bool carries = treated_arm ? panel.coarsened(j) == 1
                                     : panel.treatment_code(j) == code;
    if (carries && panel.covariates_match(target, j, match_columns)) {
      pool.members.push_back(j);
    }
  }
  if (pool.members.empty()) {
    throw EmptyPoolError("no comparison units for " + pool.target_unit +
                         (match_columns.empty()
                              ? std::string()
                              : " after covariate matching") +
                         " (target code " + std::to_string(pool.target_code) +
                         ")");
  }
  return pool;
}

}  // namespace

ComparatorPool comparator_pool(const Panel& panel, std::string_view unit,
                               int target_code,
                               const std::vector<std::string>& match_columns) {
  if (target_code < 0) {
    throw DomainError("comparator_pool: target code must be non-negative");
  }
  return build_pool(panel, panel.unit_index(unit), target_code, match_columns,
                    false);
}

ComparatorPool opposite_arm_pool(const Panel& panel, std::size_t unit,
                                 const std::vector<std::string>& match_columns) {
  const bool want_treated = panel.coarsened(unit) == 0;
  return build_pool(panel, unit, 0, match_columns, want_treated);
}

ComparatorPool opposite_arm_pool(const Panel& panel, std::string_view unit,
                                 const std::vector<std::string>& match_columns) {
  return opposite_arm_pool(panel, panel.unit_index(unit), match_columns);
}

}  // namespace policybound
