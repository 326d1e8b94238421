#include "app_panel.hpp"

#include <array>
#include <string>
#include <vector>

#include "policybound/rng.hpp"

namespace policybound {

namespace {

struct StateRow {
  const char* code;
  int expansion;
  int pdmp_2013;
  int pdmp_2014;
  int rural;
};

// Expansion, mandatory-PDMP history, and rurality indicators by state.
constexpr std::array<StateRow, 50> kStates = {{
    {"AK", 0, 0, 0, 1}, {"AL", 0, 0, 0, 0}, {"AR", 1, 0, 0, 1},
    {"AZ", 1, 0, 0, 0}, {"CA", 1, 0, 0, 0}, {"CO", 1, 0, 0, 0},
    {"CT", 1, 0, 0, 0}, {"DC", 1, 0, 0, 0}, {"DE", 1, 0, 0, 0},
    {"FL", 0, 0, 0, 0}, {"GA", 0, 0, 0, 0}, {"HI", 1, 0, 0, 1},
    {"IA", 1, 0, 0, 0}, {"ID", 0, 0, 0, 1}, {"IL", 1, 0, 0, 0},
    {"IN", 0, 0, 1, 0}, {"KS", 0, 0, 0, 0}, {"KY", 1, 0, 0, 1},
    {"LA", 0, 0, 1, 0}, {"MA", 1, 0, 1, 0}, {"MD", 1, 0, 0, 0},
    {"ME", 0, 0, 0, 1}, {"MI", 1, 0, 0, 0}, {"MN", 1, 0, 0, 0},
    {"MO", 0, 0, 0, 0}, {"MS", 0, 0, 0, 1}, {"MT", 0, 0, 0, 1},
    {"NC", 0, 0, 0, 0}, {"ND", 1, 0, 0, 1}, {"NE", 0, 0, 0, 1},
    {"NJ", 1, 0, 0, 0}, {"NM", 1, 0, 0, 0}, {"NV", 1, 0, 0, 0},
    {"NY", 1, 0, 0, 0}, {"OH", 1, 0, 0, 0}, {"OK", 0, 0, 0, 0},
    {"OR", 1, 0, 0, 0}, {"PA", 0, 0, 0, 0}, {"RI", 1, 0, 0, 0},
    {"SC", 0, 0, 0, 0}, {"SD", 0, 0, 0, 1}, {"TN", 0, 1, 1, 0},
    {"TX", 0, 0, 0, 0}, {"UT", 0, 0, 0, 0}, {"VA", 0, 0, 0, 0},
    {"VT", 1, 0, 0, 1}, {"WA", 1, 0, 0, 0}, {"WI", 0, 0, 0, 0},
    {"WV", 1, 1, 1, 0}, {"WY", 0, 0, 0, 1},
}};

constexpr int kYears[6] = {2009, 2010, 2011, 2012, 2013, 2014};

}  // namespace

Panel build_application_panel(std::uint64_t seed) {
  Rng rng(seed);

  // Common yearly drift in the outcome level.
  std::array<double, 6> year_effect{};
  double drift = 0.0;
  for (std::size_t t = 0; t < year_effect.size(); ++t) {
    drift += 0.12 + rng.normal(0.0, 0.03);
    year_effect[t] = drift;
  }

  std::vector<std::string> units;
  std::vector<double> outcomes;
  std::vector<int> treatment;
  CovariateColumn pdmp13{"pdmp_2013", true, {}, {}};
  CovariateColumn pdmp14{"pdmp_2014", true, {}, {}};
  CovariateColumn rural{"rural", true, {}, {}};
  units.reserve(kStates.size());
  outcomes.reserve(kStates.size() * 6);

  for (const StateRow& state : kStates) {
    units.emplace_back(state.code);
    treatment.push_back(state.expansion);
    pdmp13.values.push_back(state.pdmp_2013);
    pdmp14.values.push_back(state.pdmp_2014);
    rural.values.push_back(state.rural);

    const double level = rng.normal(4.0, 0.8) - 0.35 * state.rural;
    std::array<double, 6> y{};
    for (std::size_t t = 0; t < y.size(); ++t) {
      y[t] = level + year_effect[t] + rng.normal(0.0, 0.08);
    }
    if (state.expansion == 1) {
      double effect = rng.normal(0.0, 0.06);
      const std::string code(state.code);
      if (code == "IL") {
        effect = -0.9;
      } else if (code == "NM") {
        effect = 0.9;
      }
      y[5] += effect;  // policy applies in the final year only
    }
    for (double value : y) {
      outcomes.push_back(value);
    }
  }

  return Panel::from_components(
      std::move(units),
      std::vector<long long>(std::begin(kYears), std::end(kYears)),
      std::move(outcomes), std::move(treatment),
      {std::move(pdmp13), std::move(pdmp14), std::move(rural)});
}

}  // namespace policybound
