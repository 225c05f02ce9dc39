#pragma once

#include <string>

#include "reebflow/reeb_model.hpp"
#include "report.hpp"

namespace reebflow::cli {

struct Scenario {
  std::string model = "hyperbolic_g";
  double beta_amplitude = BetaProfile::kDefaultAmplitude;
  CounterexampleParams params{};

  /// Rejects unknown models and, for the counterexample, parameters that
  /// break the ordering constraints.
  void validate() const;
  ReebHomeo homeo() const;
  BetaProfile profile() const { return BetaProfile(beta_amplitude); }
  Json to_json() const;
};

Scenario scenario_from_json(const Json& doc);
Scenario load_scenario(const std::string& path);

}  // namespace reebflow::cli
