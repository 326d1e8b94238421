#include "policybound/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "policybound/bounds.hpp"
#include "policybound/cate.hpp"
#include "policybound/did.hpp"
#include "policybound/errors.hpp"
#include "policybound/normal.hpp"
#include "policybound/rng.hpp"

namespace policybound {

SimDataset draw_dataset(const DgpParams& params, int n, std::uint64_t seed) {
  if (n < 2) {
    throw DomainError("draw_dataset: need at least two units");
  }
  params.validate();
  const int periods = params.periods;
  Rng rng(seed);

  // Common time-varying intercepts, one per period.
  std::vector<double> delta_t(static_cast<std::size_t>(periods));
  for (auto& d : delta_t) {
    d = rng.normal();
  }

  const double sd_x = std::sqrt(params.sigma2_x);
  const double u_on_x = params.sigma_xu / params.sigma2_x;
  const double sd_u_resid =
      std::sqrt(params.sigma2_u - params.sigma_xu * params.sigma_xu /
                                      params.sigma2_x);

  SimDataset ds;
  ds.seed = seed;
  ds.latent.resize(static_cast<std::size_t>(n));

  std::vector<std::string> units(static_cast<std::size_t>(n));
  std::vector<long long> labels(static_cast<std::size_t>(periods));
  for (int t = 0; t < periods; ++t) {
    labels[static_cast<std::size_t>(t)] = t + 1;
  }
  std::vector<double> outcomes(static_cast<std::size_t>(n) *
                               static_cast<std::size_t>(periods));
  std::vector<int> treatment(static_cast<std::size_t>(n));
  CovariateColumn x_col;
  x_col.name = "x";
  x_col.numeric = true;
  x_col.values.resize(static_cast<std::size_t>(n));

  char name_buf[24];
  for (int i = 0; i < n; ++i) {
    SimUnit& unit = ds.latent[static_cast<std::size_t>(i)];
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    unit.x = sd_x * z1;
    unit.u = u_on_x * unit.x + sd_u_resid * z2;
    unit.a = rng.bernoulli(norm_cdf(params.probit_offset + unit.x)) ? 1 : 0;
    unit.m_if_treated = rng.bernoulli(norm_cdf(unit.x)) ? 2 : 1;
    unit.m = unit.a * unit.m_if_treated;

    const double unit_level = params.alpha0 * unit.u + params.beta0 * unit.x;
    double y_t0 = 0.0;
    for (int t = 1; t <= periods; ++t) {
      y_t0 = delta_t[static_cast<std::size_t>(t - 1)] + unit_level +
             params.base_error.draw(rng);
      if (t < periods) {
        outcomes[static_cast<std::size_t>(i) *
                     static_cast<std::size_t>(periods) +
                 static_cast<std::size_t>(t - 1)] = y_t0;
      }
    }
    unit.y_t_control = y_t0;
    unit.y_t_v1 = y_t0 + unit_ite(params, 1, unit.x, unit.u,
                                  params.version1_error.draw(rng));
    unit.y_t_v2 = y_t0 + unit_ite(params, 2, unit.x, unit.u,
                                  params.version2_error.draw(rng));

    const double y_potential =
        unit.m_if_treated == 2 ? unit.y_t_v2 : unit.y_t_v1;
    unit.true_ite = y_potential - unit.y_t_control;

    const double observed =
        unit.m == 0 ? unit.y_t_control : (unit.m == 2 ? unit.y_t_v2 : unit.y_t_v1);
    outcomes[static_cast<std::size_t>(i) * static_cast<std::size_t>(periods) +
             static_cast<std::size_t>(periods - 1)] = observed;

    std::snprintf(name_buf, sizeof(name_buf), "s%04d", i + 1);
    units[static_cast<std::size_t>(i)] = name_buf;
    treatment[static_cast<std::size_t>(i)] = unit.m;
    x_col.values[static_cast<std::size_t>(i)] = unit.x;
  }

  ds.panel = Panel::from_components(std::move(units), std::move(labels),
                                    std::move(outcomes), std::move(treatment),
                                    {std::move(x_col)});
  return ds;
}

bool accept_dataset(const SimDataset& ds, AcceptanceRule rule) {
  const Panel& panel = ds.panel;
  if (rule == AcceptanceRule::per_arm) {
    const std::size_t treated = panel.count_treated();
    return treated >= 3 && panel.n_units() - treated >= 3;
  }
  return panel.count_code(0) >= 3 && panel.count_code(1) >= 3 &&
         panel.count_code(2) >= 3;
}

ArmEval evaluate_intervals(const SimDataset& ds,
                           const std::vector<UnitInterval>& intervals) {
  if (intervals.size() != ds.latent.size()) {
    throw DomainError("evaluate_intervals: one interval per unit required");
  }
  ArmEval eval;
  for (std::size_t i = 0; i < ds.latent.size(); ++i) {
    const SimUnit& unit = ds.latent[i];
    ArmCounts& counts = unit.a == 1 ? eval.treated : eval.control;
    const UnitInterval& iv = intervals[i];
    ++counts.units;
    // Oracle half-widths put the truth exactly on an endpoint, so the
    // closed-interval test needs room for the last few ulps.
    const double tie = 1e-9 * (1.0 + std::fabs(unit.true_ite));
    if (iv.lo - tie <= unit.true_ite && unit.true_ite <= iv.hi + tie) {
      ++counts.covered;
    }
    const bool positive = iv.lo > 0.0 && unit.true_ite > 0.0;
    const bool negative = iv.hi < 0.0 && unit.true_ite < 0.0;
    if (positive || negative) {
      ++counts.power_sign;
    }
  }
  return eval;
}

const char* sim_estimator_label(SimEstimator e) {
  switch (e) {
    case SimEstimator::tau_bounds:
      return "ite_bounds_tau";
    case SimEstimator::tau_bounds_x:
      return "ite_bounds_tau_x";
    case SimEstimator::oracle_bounds:
      return "ite_bounds_tau_star";
    case SimEstimator::oracle_bounds_x:
      return "ite_bounds_tau_star_x";
    case SimEstimator::cate_ols:
      return "cate_ols";
  }
  return "";
}

std::vector<UnitInterval> estimator_intervals(const SimDataset& ds,
                                              SimEstimator estimator,
                                              double z) {
  const Panel& panel = ds.panel;
  const std::size_t n = panel.n_units();
  std::vector<UnitInterval> intervals(n);

  if (estimator == SimEstimator::cate_ols) {
    const CateFit fit = fit_cate_projection(panel, "x");
    for (std::size_t i = 0; i < n; ++i) {
      const Interval ci = cate_interval(fit, ds.latent[i].x, 0.95);
      intervals[i] = {ci.lo, ci.hi};
    }
    return intervals;
  }

  const bool adjusted = estimator == SimEstimator::tau_bounds_x ||
                        estimator == SimEstimator::oracle_bounds_x;
  const bool oracle = estimator == SimEstimator::oracle_bounds ||
                      estimator == SimEstimator::oracle_bounds_x;
  const Adjuster adjuster =
      adjusted ? Adjuster::linear({"x"}) : Adjuster::none();
  const TauRule rule = TauRule::norm_based(ResidualNorm::l1_mean, z);

  for (std::size_t i = 0; i < n; ++i) {
    const ComparatorPool pool = opposite_arm_pool(panel, i);
    const UnitDidEstimate est =
        unit_did(panel, i, kCoarsenedContrast, adjuster, pool);
    double tau = 0.0;
    if (oracle) {
      tau = oracle_tau(ds.true_counterfactual(i), est.predicted_counterfactual);
    } else {
      const ResidualVector res =
          pre_period_residuals(panel, i, adjuster, pool);
      tau = tau_from_rule(res, rule).half_width;
    }
    intervals[i] = {est.point - tau, est.point + tau};
  }
  return intervals;
}

double SimReport::coverage(SimEstimator e, bool treated_arm) const {
  const Cell& cell =
      cells[static_cast<std::size_t>(e)][treated_arm ? 0 : 1];
  return cell.units == 0 ? 0.0
                         : static_cast<double>(cell.covered) /
                               static_cast<double>(cell.units);
}

double SimReport::power_and_sign(SimEstimator e, bool treated_arm) const {
  const Cell& cell =
      cells[static_cast<std::size_t>(e)][treated_arm ? 0 : 1];
  return cell.units == 0 ? 0.0
                         : static_cast<double>(cell.power_sign) /
                               static_cast<double>(cell.units);
}

namespace {

struct RepResult {
  std::array<std::array<SimReport::Cell, 2>, 5> cells{};
  std::array<bool, 5> failed{};
  long long rejected = 0;
};

RepResult run_one_replication(const DgpParams& params, int n,
                              std::uint64_t base_seed, int rep) {
  RepResult result;
  // Replication `rep` starts from base_seed + rep; rejected draws are
  // replaced from seeds derived off that pair, so slots never interact.
  std::uint64_t seed = base_seed + static_cast<std::uint64_t>(rep);
  SimDataset ds = draw_dataset(params, n, seed);
  for (std::uint64_t attempt = 1; !accept_dataset(ds); ++attempt) {
    ++result.rejected;
    seed = mix_seed(base_seed + static_cast<std::uint64_t>(rep), attempt);
    ds = draw_dataset(params, n, seed);
  }

  for (std::size_t e = 0; e < kSimEstimators.size(); ++e) {
    try {
      const auto intervals = estimator_intervals(ds, kSimEstimators[e]);
      const ArmEval eval = evaluate_intervals(ds, intervals);
      auto& treated = result.cells[e][0];
      treated.units += eval.treated.units;
      treated.covered += eval.treated.covered;
      treated.power_sign += eval.treated.power_sign;
      auto& control = result.cells[e][1];
      control.units += eval.control.units;
      control.covered += eval.control.covered;
      control.power_sign += eval.control.power_sign;
    } catch (const Error&) {
      result.failed[e] = true;
    }
  }
  return result;
}

}  // namespace

SimReport run_replications(const DgpParams& params, int n, int reps,
                           std::uint64_t base_seed, int workers) {
  if (reps < 1) {
    throw DomainError("run_replications: need at least one replication");
  }
  std::vector<RepResult> results(static_cast<std::size_t>(reps));

  const int thread_count =
      std::max(1, std::min(workers, reps));
  if (thread_count == 1) {
    for (int r = 0; r < reps; ++r) {
      results[static_cast<std::size_t>(r)] =
          run_one_replication(params, n, base_seed, r);
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= reps) {
          return;
        }
        try {
          results[static_cast<std::size_t>(r)] =
              run_one_replication(params, n, base_seed, r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int w = 0; w < thread_count; ++w) {
      threads.emplace_back(worker);
    }
    for (auto& t : threads) {
      t.join();
    }
    if (first_error) {
      std::rethrow_exception(first_error);
    }
  }

  // Order-insensitive aggregation: integer counts summed in slot order.
  SimReport report;
  report.n_units = n;
  report.reps = reps;
  report.base_seed = base_seed;
  for (const RepResult& rep : results) {
    report.rejected_draws += rep.rejected;
    for (std::size_t e = 0; e < kSimEstimators.size(); ++e) {
      if (rep.failed[e]) {
        ++report.failed_replications[e];
        continue;
      }
      for (std::size_t arm = 0; arm < 2; ++arm) {
        report.cells[e][arm].units += rep.cells[e][arm].units;
        report.cells[e][arm].covered += rep.cells[e][arm].covered;
        report.cells[e][arm].power_sign += rep.cells[e][arm].power_sign;
      }
    }
  }
  for (std::size_t e = 0; e < kSimEstimators.size(); ++e) {
    if (100 * report.failed_replications[e] > reps) {
      throw Error(std::string("run_replications: estimator ") +
                  sim_estimator_label(kSimEstimators[e]) +
                  " failed on more than 1% of replications");
    }
  }
  return report;
}

IllustrationBundle make_illustration(std::uint64_t seed, int n) {
  IllustrationBundle bundle;
  bundle.params = DgpParams::illustration();
  bundle.dataset = draw_dataset(bundle.params, n, seed);
  bundle.projection =
      projection_oracle(bundle.params, MixtureKind::cate,
                        ProjectionWeighting::marginal);

  const double lo = -3.0;
  const double hi = 3.0;
  const int steps = 120;
  bundle.grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    const double x = lo + (hi - lo) * k / steps;
    IllustrationBundle::GridRow row;
    row.x = x;
    row.cde_v1 = version_cde(bundle.params, 1, x);
    row.cde_v2 = version_cde(bundle.params, 2, x);
    row.cate_v1 = version_cate(bundle.params, 1, x);
    row.cate_v2 = version_cate(bundle.params, 2, x);
    row.coarsened_cate = coarsened_mixture(bundle.params, x, MixtureKind::cate);
    row.coarsened_cde = coarsened_mixture(bundle.params, x, MixtureKind::cde);
    row.projection = bundle.projection.intercept + bundle.projection.slope * x;
    bundle.grid.push_back(row);
  }
  return bundle;
}

}  // namespace policybound
