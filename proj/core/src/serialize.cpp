#include "policybound/serialize.hpp"

#include <json.hpp>

#include "policybound/csv.hpp"

namespace policybound {

namespace {

using Json = nlohmann::ordered_json;

Json bound_to_json_object(const BoundResult& b) {
  Json j;
  j["unit"] = b.unit;
  j["point"] = b.point;
  j["center_shift"] = b.tau.center_shift;
  j["half_width"] = b.tau.half_width;
  j["lo"] = b.lo;
  j["hi"] = b.hi;
  j["sign"] = sign_label(b.sign);
  j["rule"] = b.rule.label();
  j["strategy"] = b.strategy;
  if (!b.components.empty()) {
    Json parts = Json::array();
    for (const auto& [lo, hi] : b.components) {
      parts.push_back(Json{{"lo", lo}, {"hi", hi}});
    }
    j["components"] = std::move(parts);
  }
  return j;
}

}  // namespace

std::string bounds_to_csv(const std::vector<BoundResult>& bounds) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(bounds.size());
  for (const auto& b : bounds) {
    rows.push_back({b.unit, format_double(b.point), format_double(b.lo),
                    format_double(b.hi), sign_label(b.sign), b.rule.label(),
                    b.strategy});
  }
  return write_csv({"unit", "point", "lo", "hi", "sign", "rule", "strategy"},
                   rows);
}

std::string bounds_to_json(const std::vector<BoundResult>& bounds) {
  Json out = Json::array();
  for (const auto& b : bounds) {
    out.push_back(bound_to_json_object(b));
  }
  return out.dump(2) + "\n";
}

std::string grid_to_csv(const RobustnessGrid& grid) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(grid.rows.size());
  for (const auto& row : grid.rows) {
    rows.push_back({row.unit, std::to_string(row.negative_count),
                    std::to_string(row.positive_count)});
  }
  return write_csv({"state", "negative", "positive"}, rows);
}

std::string grid_to_json(const RobustnessGrid& grid) {
  Json out;
  out["z"] = grid.z;
  Json specs = Json::array();
  for (const auto& label : grid.spec_labels) {
    specs.push_back(label);
  }
  out["specifications"] = std::move(specs);
  Json units = Json::array();
  for (const auto& row : grid.rows) {
    Json cells = Json::array();
    for (const auto& cell : row.cells) {
      cells.push_back(cell.evaluable ? sign_label(cell.sign)
                                     : "not_evaluable");
    }
    units.push_back(Json{{"unit", row.unit},
                         {"negative", row.negative_count},
                         {"positive", row.positive_count},
                         {"cells", std::move(cells)}});
  }
  out["units"] = std::move(units);
  return out.dump(2) + "\n";
}

std::string sim_report_to_csv(const SimReport& report) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(10);
  for (const char* statistic : {"coverage", "power_and_sign"}) {
    const bool coverage = std::string(statistic) == "coverage";
    for (SimEstimator e : kSimEstimators) {
      const double treated =
          coverage ? report.coverage(e, true) : report.power_and_sign(e, true);
      const double control = coverage ? report.coverage(e, false)
                                      : report.power_and_sign(e, false);
      rows.push_back({sim_estimator_label(e), statistic,
                      format_double(treated), format_double(control)});
    }
  }
  return write_csv({"estimator", "statistic", "treated", "control"}, rows);
}

std::string sim_report_to_json(const SimReport& report) {
  Json out;
  out["n"] = report.n_units;
  out["reps"] = report.reps;
  out["base_seed"] = report.base_seed;
  out["rejected_draws"] = report.rejected_draws;
  Json estimators = Json::array();
  for (std::size_t e = 0; e < kSimEstimators.size(); ++e) {
    const SimEstimator est = kSimEstimators[e];
    Json cell;
    cell["estimator"] = sim_estimator_label(est);
    cell["failed_replications"] = report.failed_replications[e];
    for (const bool treated : {true, false}) {
      const auto& counts = report.cells[e][treated ? 0 : 1];
      Json arm;
      arm["units"] = counts.units;
      arm["covered"] = counts.covered;
      arm["power_sign"] = counts.power_sign;
      arm["coverage"] = report.coverage(est, treated);
      arm["power_and_sign"] = report.power_and_sign(est, treated);
      cell[treated ? "treated" : "control"] = std::move(arm);
    }
    estimators.push_back(std::move(cell));
  }
  out["estimators"] = std::move(estimators);
  return out.dump(2) + "\n";
}

std::string cate_fit_to_json(const CateFit& fit) {
  Json out;
  Json coef;
  for (std::size_t j = 0; j < fit.coef.size(); ++j) {
    coef[CateFit::kNames[j]] = fit.coef[j];
  }
  out["coefficients"] = std::move(coef);
  Json cov = Json::array();
  for (std::size_t r = 0; r < 4; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < 4; ++c) {
      row.push_back(fit.covariance[r * 4 + c]);
    }
    cov.push_back(std::move(row));
  }
  out["covariance"] = std::move(cov);
  out["n"] = fit.n;
  out["variant"] = fit.variant;
  return out.dump(2) + "\n";
}

std::string twfe_table_to_csv(const std::vector<TwfeTableRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({r.estimand, std::to_string(r.n), std::to_string(r.n_treated),
                   r.has_estimate ? format_double(r.estimate) : "",
                   r.has_se ? format_double(r.std_error) : "",
                   r.has_se ? format_double(r.ci_lo) : "",
                   r.has_se ? format_double(r.ci_hi) : ""});
  }
  return write_csv({"estimand", "n", "n_treated", "estimate", "std_error",
                    "ci_lo", "ci_hi"},
                   out);
}

std::string illustration_grid_to_csv(const IllustrationBundle& bundle) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(bundle.grid.size());
  for (const auto& g : bundle.grid) {
    rows.push_back({format_double(g.x), format_double(g.cde_v1),
                    format_double(g.cde_v2), format_double(g.cate_v1),
                    format_double(g.cate_v2), format_double(g.coarsened_cate),
                    format_double(g.coarsened_cde),
                    format_double(g.projection)});
  }
  return write_csv({"x", "cde_v1", "cde_v2", "cate_v1", "cate_v2",
                    "coarsened_cate", "coarsened_cde", "projection"},
                   rows);
}

std::string illustration_scatter_to_csv(const IllustrationBundle& bundle) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(bundle.dataset.latent.size());
  const auto& units = bundle.dataset.panel.units();
  for (std::size_t i = 0; i < bundle.dataset.latent.size(); ++i) {
    const SimUnit& u = bundle.dataset.latent[i];
    rows.push_back({units[i], format_double(u.x),
                    std::to_string(u.m_if_treated), std::to_string(u.a),
                    format_double(u.true_ite)});
  }
  return write_csv({"unit", "x", "version", "treated", "true_ite"}, rows);
}

std::string illustration_metadata_to_json(const IllustrationBundle& bundle,
                                          std::uint64_t seed) {
  Json out;
  out["seed"] = seed;
  out["n"] = bundle.dataset.latent.size();
  out["sigma_xu"] = bundle.params.sigma_xu;
  out["sigma2_x"] = bundle.params.sigma2_x;
  out["sigma2_u"] = bundle.params.sigma2_u;
  out["probit_offset"] = bundle.params.probit_offset;
  out["periods"] = bundle.params.periods;
  Json projection;
  projection["intercept"] = bundle.projection.intercept;
  projection["slope"] = bundle.projection.slope;
  out["cate_projection"] = std::move(projection);
  return out.dump(2) + "\n";
}

}  // namespace policybound
