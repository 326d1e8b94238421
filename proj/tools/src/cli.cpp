#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "policybound/bounds.hpp"
#include "policybound/csv.hpp"
#include "policybound/errors.hpp"
#include "policybound/panel.hpp"
#include "policybound/serialize.hpp"
#include "policybound/sim.hpp"
#include "svg.hpp"

namespace policybound {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw Error("failed writing '" + path + "'");
  }
}

// Flat key=value configuration: keys mirror the active subcommand's long
// flags ("n=50"). Values from the file are injected only for flags the
// command line did not set, so explicit flags always win.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string config_path;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        throw Error("--config needs a file path");
      }
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) {
    return out;
  }

  std::ifstream in(config_path);
  if (!in) {
    throw Error("cannot open config file '" + config_path + "'");
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    const auto eq = line.find('=', first);
    if (eq == std::string::npos) {
      throw Error("config line without '=': " + line);
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(first, eq - first));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error("config line with empty key: " + line);
    }
    const std::string flag = "--" + key;
    bool already_set = false;
    for (const auto& arg : out) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
        already_set = true;
        break;
      }
    }
    if (!already_set) {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

ResidualNorm parse_norm(const std::string& name) {
  if (name == "l1_mean") {
    return ResidualNorm::l1_mean;
  }
  if (name == "l2") {
    return ResidualNorm::l2;
  }
  if (name == "linf") {
    return ResidualNorm::linf;
  }
  throw Error("unknown norm '" + name + "' (expected l1_mean, l2, or linf)");
}

Adjuster parse_adjuster(const std::string& name,
                        const std::vector<std::string>& columns) {
  if (name == "none") {
    return Adjuster::none();
  }
  if (name == "twfe") {
    return Adjuster::twfe();
  }
  if (name == "linear" || name == "discrete") {
    if (columns.empty()) {
      throw Error("adjuster '" + name + "' needs --adjust-columns");
    }
    return name == "linear" ? Adjuster::linear(columns)
                            : Adjuster::discrete(columns);
  }
  throw Error("unknown adjuster '" + name + "'");
}

TauRule make_rule(const std::string& style, ResidualNorm norm, double z) {
  if (style == "norm_based") {
    return TauRule::norm_based(norm, z);
  }
  if (style == "last_plus_maxdiff") {
    return TauRule::last_plus_maxdiff(z);
  }
  throw Error("unknown rule style '" + style + "'");
}

struct BoundOptions {
  std::string panel_path;
  double z = 2.0;
  std::string norm = "linf";
  std::string style = "norm_based";
  std::string adjuster = "none";
  std::vector<std::string> adjust_columns;
  std::vector<std::string> match_columns;
  std::string strategy = "standard";
  double inflation = 1.0;
  int assume_version = 1;
  std::string out_path;
  std::string json_path;
  std::string svg_path;
};

// Per-unit bounds for the whole panel: treated units always take the
// standard coarsened bound; untreated units follow the chosen strategy.
std::vector<BoundResult> panel_bounds(const Panel& panel,
                                      const BoundOptions& opt, double z) {
  const Adjuster adjuster = parse_adjuster(opt.adjuster, opt.adjust_columns);
  const TauRule rule = make_rule(opt.style, parse_norm(opt.norm), z);
  std::vector<BoundResult> bounds;
  bounds.reserve(panel.n_units());
  for (std::size_t i = 0; i < panel.n_units(); ++i) {
    if (panel.coarsened(i) == 1 || opt.strategy == "standard") {
      bounds.push_back(
          coarsened_bound(panel, i, adjuster, rule, opt.match_columns));
      continue;
    }
    CoarseningStrategy strategy = CoarseningStrategy::conservative(opt.inflation);
    if (opt.strategy == "assume_version") {
      strategy = CoarseningStrategy::assume_version(opt.assume_version);
    } else if (opt.strategy == "union_over_versions") {
      strategy = CoarseningStrategy::union_over_versions();
    } else if (opt.strategy != "conservative") {
      throw Error("unknown strategy '" + opt.strategy + "'");
    }
    bounds.push_back(
        coarsened_untreated_bound(panel, i, strategy, rule, adjuster));
  }
  return bounds;
}

void run_bound(const BoundOptions& opt) {
  const Panel panel = Panel::from_csv(read_file(opt.panel_path));
  const std::vector<BoundResult> main_bounds = panel_bounds(panel, opt, opt.z);

  // Dot markers at the conventional multiplier grid.
  const double z_grid[3] = {1.0, 1.5, 2.0};
  std::vector<std::vector<BoundResult>> dots;
  dots.reserve(3);
  for (double z : z_grid) {
    dots.push_back(panel_bounds(panel, opt, z));
  }

  std::vector<std::string> header = {"unit", "point",   "lo",   "hi",
                                     "sign", "rule",    "strategy",
                                     "lo_z1", "hi_z1",  "lo_z1_5",
                                     "hi_z1_5", "lo_z2", "hi_z2"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(main_bounds.size());
  for (std::size_t i = 0; i < main_bounds.size(); ++i) {
    const BoundResult& b = main_bounds[i];
    std::vector<std::string> row = {b.unit,
                                    format_double(b.point),
                                    format_double(b.lo),
                                    format_double(b.hi),
                                    sign_label(b.sign),
                                    b.rule.label(),
                                    b.strategy};
    for (const auto& grid : dots) {
      row.push_back(format_double(grid[i].lo));
      row.push_back(format_double(grid[i].hi));
    }
    rows.push_back(std::move(row));
  }
  write_file(opt.out_path, write_csv(header, rows));
  if (!opt.json_path.empty()) {
    write_file(opt.json_path, bounds_to_json(main_bounds));
  }
  if (!opt.svg_path.empty()) {
    write_file(opt.svg_path, bounds_svg(main_bounds, dots));
  }
}

struct TippingOptions {
  std::string panel_path;
  std::string norm = "linf";
  std::string adjuster = "none";
  std::vector<std::string> adjust_columns;
  std::vector<std::string> match_columns;
  std::string out_path;
};

void run_tipping(const TippingOptions& opt) {
  const Panel panel = Panel::from_csv(read_file(opt.panel_path));
  const Adjuster adjuster = parse_adjuster(opt.adjuster, opt.adjust_columns);
  const ResidualNorm norm = parse_norm(opt.norm);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(panel.n_units());
  for (std::size_t i = 0; i < panel.n_units(); ++i) {
    const ComparatorPool pool = opposite_arm_pool(panel, i, opt.match_columns);
    const UnitDidEstimate est =
        unit_did(panel, i, kCoarsenedContrast, adjuster, pool);
    const ResidualVector res =
        pre_period_residuals(panel, i, adjuster, pool);
    const double scale = residual_norm(res.values, norm);
    const double z_star = tipping_z(est, res, norm);
    rows.push_back({est.unit, format_double(est.point), format_double(scale),
                    format_double(z_star)});
  }
  write_file(opt.out_path,
             write_csv({"unit", "point", "residual_norm", "tipping_z"}, rows));
}

struct TableOptions {
  std::string panel_path;
  std::vector<std::string> moderators;
  std::string out_path;
};

std::vector<double> column_levels(const Panel& panel, const std::string& name) {
  const CovariateColumn& col = panel.covariate(name);
  if (!col.numeric) {
    throw Error("moderator column '" + name + "' must be numeric");
  }
  std::vector<double> levels = col.values;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

TwfeTableRow table_row(const Panel& panel, const std::string& label,
                       const std::vector<std::size_t>& subset) {
  TwfeTableRow row;
  row.estimand = label;
  row.n = subset.size();
  for (std::size_t i : subset) {
    row.n_treated += panel.coarsened(i) == 1;
  }
  try {
    const TwfeAte ate = twfe_ate(panel, subset);
    row.has_estimate = true;
    row.estimate = ate.estimate;
    if (ate.std_error) {
      row.has_se = true;
      row.std_error = *ate.std_error;
      row.ci_lo = ate.ci->lo;
      row.ci_hi = ate.ci->hi;
    }
  } catch (const DegenerateSubsetError&) {
    // leave the value cells empty
  }
  return row;
}

void run_table(const TableOptions& opt) {
  const Panel panel = Panel::from_csv(read_file(opt.panel_path));
  if (opt.moderators.size() > 2) {
    throw Error("table supports at most two moderator columns");
  }

  auto subset_where = [&](const std::vector<std::pair<std::string, double>>&
                              conditions) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < panel.n_units(); ++i) {
      bool keep = true;
      for (const auto& [column, value] : conditions) {
        if (panel.numeric_covariate(i, column) != value) {
          keep = false;
          break;
        }
      }
      if (keep) {
        subset.push_back(i);
      }
    }
    return subset;
  };
  auto label_of = [](const std::vector<std::pair<std::string, double>>&
                         conditions) {
    if (conditions.empty()) {
      return std::string("overall");
    }
    std::string label;
    for (const auto& [column, value] : conditions) {
      if (!label.empty()) {
        label += " & ";
      }
      label += column + "=" + format_double(value);
    }
    return label;
  };

  using Conditions = std::vector<std::pair<std::string, double>>;
  std::vector<Conditions> cases;
  cases.push_back({});
  if (!opt.moderators.empty()) {
    for (double v : column_levels(panel, opt.moderators[0])) {
      cases.push_back({{opt.moderators[0], v}});
    }
  }
  if (opt.moderators.size() == 2) {
    for (double w : column_levels(panel, opt.moderators[1])) {
      cases.push_back({{opt.moderators[1], w}});
      for (double v : column_levels(panel, opt.moderators[0])) {
        cases.push_back({{opt.moderators[1], w}, {opt.moderators[0], v}});
      }
    }
  }

  std::vector<TwfeTableRow> rows;
  rows.reserve(cases.size());
  for (const Conditions& conditions : cases) {
    rows.push_back(
        table_row(panel, label_of(conditions), subset_where(conditions)));
  }
  write_file(opt.out_path, twfe_table_to_csv(rows));
}

struct RobustnessOptions {
  std::string panel_path;
  double z = 2.0;
  std::vector<std::string> history_columns = {"pdmp_2013", "pdmp_2014"};
  std::string out_path;
  std::string json_path;
};

void run_robustness(const RobustnessOptions& opt) {
  const Panel panel = Panel::from_csv(read_file(opt.panel_path));
  const RobustnessGrid grid = robustness_grid(panel, opt.z, opt.history_columns);
  write_file(opt.out_path, grid_to_csv(grid));
  if (!opt.json_path.empty()) {
    write_file(opt.json_path, grid_to_json(grid));
  }
}

struct SimulateOptions {
  int n = 50;
  int reps = 1000;
  std::uint64_t seed = 42;
  int workers = 0;
  std::string out_path;
  std::string json_path;
};

void run_simulate(const SimulateOptions& opt) {
  const SimReport report =
      run_replications(DgpParams::simulation(), opt.n, opt.reps, opt.seed,
                       resolve_workers(opt.workers));
  write_file(opt.out_path, sim_report_to_csv(report));
  if (!opt.json_path.empty()) {
    write_file(opt.json_path, sim_report_to_json(report));
  }
}

struct IllustrateOptions {
  std::uint64_t seed = 42;
  int n = 1000;
  std::string grid_path;
  std::string scatter_path;
  std::string meta_path;
  std::string svg_path;
};

void run_illustrate(const IllustrateOptions& opt) {
  const IllustrationBundle bundle = make_illustration(opt.seed, opt.n);
  write_file(opt.grid_path, illustration_grid_to_csv(bundle));
  write_file(opt.scatter_path, illustration_scatter_to_csv(bundle));
  if (!opt.meta_path.empty()) {
    write_file(opt.meta_path, illustration_metadata_to_json(bundle, opt.seed));
  }
  if (!opt.svg_path.empty()) {
    write_file(opt.svg_path, illustration_svg(bundle));
  }
}

}  // namespace

int resolve_workers(int requested) {
  int workers = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) {
    workers = 1;
  }
  if (const char* cap_text = std::getenv("POLICYBOUND_THREADS")) {
    const int cap = std::atoi(cap_text);
    if (cap >= 1 && cap < workers) {
      workers = cap;
    }
  }
  return workers;
}

int dispatch(const std::vector<std::string>& raw_args) {
  CLI::App app{"Partial-identification bounds for state-specific policy "
               "effects in short panels"};
  app.require_subcommand(1);

  std::string config_doc;  // stripped before parsing; listed for --help
  SimulateOptions sim_opt;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Replication study of the five estimators");
  sim->add_option("--config", config_doc,
                  "Flat key=value file mirroring this command's flags");
  sim->add_option("--n", sim_opt.n, "Units per dataset")->check(CLI::Range(2, 1000000));
  sim->add_option("--reps", sim_opt.reps, "Accepted replications")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_opt.seed, "Base seed");
  sim->add_option("--workers", sim_opt.workers,
                  "Worker threads (0 = hardware)");
  sim->add_option("--out", sim_opt.out_path, "Report CSV path")->required();
  sim->add_option("--json", sim_opt.json_path, "Report JSON path");
  sim->callback([&] { run_simulate(sim_opt); });

  IllustrateOptions ill_opt;
  CLI::App* ill = app.add_subcommand(
      "illustrate", "Estimand curves, projection line, and effect scatter");
  ill->add_option("--config", config_doc,
                  "Flat key=value file mirroring this command's flags");
  ill->add_option("--seed", ill_opt.seed, "Seed for the scatter draw");
  ill->add_option("--n", ill_opt.n, "Scatter units")->check(CLI::Range(2, 10000000));
  ill->add_option("--out-grid", ill_opt.grid_path, "Curve grid CSV path")
      ->required();
  ill->add_option("--out-scatter", ill_opt.scatter_path, "Scatter CSV path")
      ->required();
  ill->add_option("--meta", ill_opt.meta_path, "Metadata JSON path");
  ill->add_option("--svg", ill_opt.svg_path, "Chart SVG path");
  ill->callback([&] { run_illustrate(ill_opt); });

  BoundOptions bound_opt;
  CLI::App* bound = app.add_subcommand(
      "bound", "Per-unit effect bounds on the coarsened contrast");
  bound->add_option("--config", config_doc,
                  "Flat key=value file mirroring this command's flags");
  bound->add_option("--panel", bound_opt.panel_path, "Panel CSV path")
      ->required();
  bound->add_option("--z", bound_opt.z, "Sensitivity multiplier")
      ->check(CLI::NonNegativeNumber);
  bound->add_option("--norm", bound_opt.norm, "l1_mean | l2 | linf");
  bound->add_option("--style", bound_opt.style,
                    "norm_based | last_plus_maxdiff");
  bound->add_option("--adjuster", bound_opt.adjuster,
                    "none | twfe | linear | discrete");
  bound->add_option("--adjust-columns", bound_opt.adjust_columns,
                    "Covariates for linear/discrete adjusters")
      ->delimiter(',');
  bound->add_option("--match-columns", bound_opt.match_columns,
                    "Exact-match columns for the comparator pool")
      ->delimiter(',');
  bound->add_option("--strategy", bound_opt.strategy,
                    "standard | conservative | assume_version | "
                    "union_over_versions (untreated units)");
  bound->add_option("--inflation", bound_opt.inflation,
                    "Multiplier inflation for the conservative strategy")
      ->check(CLI::NonNegativeNumber);
  bound->add_option("--assume-version", bound_opt.assume_version,
                    "Version m for the assume_version strategy");
  bound->add_option("--out", bound_opt.out_path, "Bounds CSV path")
      ->required();
  bound->add_option("--json", bound_opt.json_path, "Bounds JSON path");
  bound->add_option("--svg", bound_opt.svg_path, "Chart SVG path");
  bound->callback([&] { run_bound(bound_opt); });

  TippingOptions tip_opt;
  CLI::App* tip = app.add_subcommand(
      "tipping", "Per-unit multiplier at which bounds reach zero");
  tip->add_option("--config", config_doc,
                  "Flat key=value file mirroring this command's flags");
  tip->add_option("--panel", tip_opt.panel_path, "Panel CSV path")->required();
  tip->add_option("--norm", tip_opt.norm, "l1_mean | l2 | linf");
  tip->add_option("--adjuster", tip_opt.adjuster,
                  "none | twfe | linear | discrete");
  tip->add_option("--adjust-columns", tip_opt.adjust_columns,
                  "Covariates for linear/discrete adjusters")
      ->delimiter(',');
  tip->add_option("--match-columns", tip_opt.match_columns,
                  "Exact-match columns for the comparator pool")
      ->delimiter(',');
  tip->add_option("--out", tip_opt.out_path, "Tipping CSV path")->required();
  tip->callback([&] { run_tipping(tip_opt); });

  RobustnessOptions rob_opt;
  CLI::App* rob = app.add_subcommand(
      "robustness", "Sign counts across the eight-specification grid");
  rob->add_option("--config", config_doc,
                  "Flat key=value file mirroring this command's flags");
  rob->add_option("--panel", rob_opt.panel_path, "Panel CSV path")->required();
  rob->add_option("--z", rob_opt.z, "Sensitivity multiplier")
      ->check(CLI::NonNegativeNumber);
  rob->add_option("--history-columns", rob_opt.history_columns,
                  "Columns defining the matched-comparator variant")
      ->delimiter(',');
  rob->add_option("--out", rob_opt.out_path, "Counts CSV path")->required();
  rob->add_option("--json", rob_opt.json_path, "Cell detail JSON path");
  rob->callback([&] { run_robustness(rob_opt); });

  TableOptions table_opt;
  CLI::App* table = app.add_subcommand(
      "table", "Average and conditional TWFE effects by subsets");
  table->add_option("--config", config_doc,
                  "Flat key=value file mirroring this command's flags");
  table->add_option("--panel", table_opt.panel_path, "Panel CSV path")
      ->required();
  table->add_option("--moderators", table_opt.moderators,
                    "Up to two binary moderator columns")
      ->delimiter(',');
  table->add_option("--out", table_opt.out_path, "Table CSV path")->required();
  table->callback([&] { run_table(table_opt); });

  std::vector<std::string> args;
  try {
    args = apply_config_file(raw_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("policybound");
  for (const auto& arg : args) {
    argv.push_back(arg.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace policybound
