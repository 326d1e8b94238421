#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "policybound/estimands.hpp"
#include "policybound/panel.hpp"

namespace policybound {

// Latent state of one simulated unit. m_if_treated is the version the
// unit would adopt if it adopted any (drawn for every unit), and true_ite
// is the realized coarsened effect Y_T(M(1)) - Y_T(0).
struct SimUnit {
  double x = 0.0;
  double u = 0.0;
  int m_if_treated = 1;
  int a = 0;
  int m = 0;
  double y_t_control = 0.0;  // Y_{iT}(0)
  double y_t_v1 = 0.0;       // Y_{iT}(1)
  double y_t_v2 = 0.0;       // Y_{iT}(2)
  double true_ite = 0.0;
};

struct SimDataset {
  Panel panel;
  std::vector<SimUnit> latent;
  std::uint64_t seed = 0;

  double true_counterfactual(std::size_t unit) const {
    const SimUnit& s = latent[unit];
    if (s.a == 1) {
      return s.y_t_control;
    }
    return s.m_if_treated == 2 ? s.y_t_v2 : s.y_t_v1;
  }
};

// One draw from the longitudinal two-version model: common period
// intercepts delta_t ~ N(0,1) enter levels in place of delta_0,
// pre-period outcomes equal Y_t(0), and version effects (with their own
// error law) apply at the final period only. The panel carries a single
// numeric covariate column "x".
SimDataset draw_dataset(const DgpParams& params, int n, std::uint64_t seed);

// Keep a dataset only when every treatment level has enough units.
// per_version asks for three units at each of M = 0, 1, 2; per_arm only
// at the coarsened levels.
enum class AcceptanceRule { per_version, per_arm };
bool accept_dataset(const SimDataset& ds,
                    AcceptanceRule rule = AcceptanceRule::per_version);

struct UnitInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Closed-interval coverage of the true ITE and the strict
// exclude-zero-with-correct-sign indicator, tallied separately by arm.
struct ArmCounts {
  long long units = 0;
  long long covered = 0;
  long long power_sign = 0;
};

struct ArmEval {
  ArmCounts treated;
  ArmCounts control;
};

ArmEval evaluate_intervals(const SimDataset& ds,
                           const std::vector<UnitInterval>& intervals);

// The five estimators compared in the replication study. tau_bounds uses
// the mean-absolute-error rule on pre-period residuals with Z = 2;
// *_x variants add the linear covariate adjustment on x; oracle variants
// use the infeasible exact half-width; cate_ols is the interacted OLS
// confidence interval at each unit's x.
enum class SimEstimator {
  tau_bounds,
  tau_bounds_x,
  oracle_bounds,
  oracle_bounds_x,
  cate_ols
};

inline constexpr std::array<SimEstimator, 5> kSimEstimators = {
    SimEstimator::tau_bounds, SimEstimator::tau_bounds_x,
    SimEstimator::oracle_bounds, SimEstimator::oracle_bounds_x,
    SimEstimator::cate_ols};

const char* sim_estimator_label(SimEstimator e);

// Per-unit uncertainty intervals for one estimator on one dataset.
std::vector<UnitInterval> estimator_intervals(const SimDataset& ds,
                                              SimEstimator estimator,
                                              double z = 2.0);

// Aggregated replication study. Counts are plain integers summed in
// replication order, so reports are bit-identical for any worker count.
struct SimReport {
  struct Cell {
    long long units = 0;
    long long covered = 0;
    long long power_sign = 0;
  };

  int n_units = 0;
  int reps = 0;
  std::uint64_t base_seed = 0;
  long long rejected_draws = 0;
  std::array<std::array<Cell, 2>, 5> cells{};     // estimator x arm(0=treated)
  std::array<long long, 5> failed_replications{};

  double coverage(SimEstimator e, bool treated_arm) const;
  double power_and_sign(SimEstimator e, bool treated_arm) const;
};

// Draw `reps` accepted datasets (rejected draws are replaced from fresh
// derived seeds, so replication r depends only on base_seed and r),
// evaluate the five estimators on each, and pool unit-level counts.
// Throws if any estimator fails on more than 1% of replications.
SimReport run_replications(const DgpParams& params, int n, int reps,
                           std::uint64_t base_seed, int workers = 1);

// Figure-style bundle: one illustration draw plus the analytic curves on
// an x grid and the least-squares line of the coarsened CATE.
struct IllustrationBundle {
  struct GridRow {
    double x = 0.0;
    double cde_v1 = 0.0;
    double cde_v2 = 0.0;
    double cate_v1 = 0.0;
    double cate_v2 = 0.0;
    double coarsened_cate = 0.0;
    double coarsened_cde = 0.0;
    double projection = 0.0;
  };

  DgpParams params;
  SimDataset dataset;
  LinearProjection projection;  // marginal projection of the coarsened CATE
  std::vector<GridRow> grid;
};

IllustrationBundle make_illustration(std::uint64_t seed, int n = 1000);

}  // namespace policybound
