#pragma once

#include <string>
#include <vector>

#include "policybound/bounds.hpp"
#include "policybound/cate.hpp"
#include "policybound/sim.hpp"

namespace policybound {

// (unit, point, lo, hi, sign, rule, strategy), one row per bound.
std::string bounds_to_csv(const std::vector<BoundResult>& bounds);
std::string bounds_to_json(const std::vector<BoundResult>& bounds);

// Robustness grid in the counts shape: state, negative, positive.
std::string grid_to_csv(const RobustnessGrid& grid);
// Full grid detail: per-spec classification for every unit.
std::string grid_to_json(const RobustnessGrid& grid);

// Replication study in the report-table shape: estimator, statistic,
// treated, control.
std::string sim_report_to_csv(const SimReport& report);
std::string sim_report_to_json(const SimReport& report);

std::string cate_fit_to_json(const CateFit& fit);

// Average-effects rows produced by the table command. Cells that cannot
// be computed on a subset stay empty in the CSV.
struct TwfeTableRow {
  std::string estimand;
  std::size_t n = 0;
  std::size_t n_treated = 0;
  bool has_estimate = false;
  double estimate = 0.0;
  bool has_se = false;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

std::string twfe_table_to_csv(const std::vector<TwfeTableRow>& rows);

// Figure data: analytic curves on the x grid, and the per-unit effect
// scatter at the realized version.
std::string illustration_grid_to_csv(const IllustrationBundle& bundle);
std::string illustration_scatter_to_csv(const IllustrationBundle& bundle);
std::string illustration_metadata_to_json(const IllustrationBundle& bundle,
                                          std::uint64_t seed);

}  // namespace policybound
