#include "scenario.hpp"

#include <fstream>

#include "reebflow/error.hpp"

namespace reebflow::cli {

void Scenario::validate() const {
  if (model != "hyperbolic_g" && model != "counterexample")
    throw DomainError("unknown model '" + model + "' (expected hyperbolic_g or counterexample)");
  (void)profile();
  if (model == "counterexample") params.validate();
}

ReebHomeo Scenario::homeo() const {
  validate();
  return model == "counterexample" ? ReebHomeo::counterexample(profile()) : ReebHomeo::hyperbolic_g();
}

Json Scenario::to_json() const {
  return Json{{"model", model},
              {"beta_amplitude", beta_amplitude},
              {"params", {{"a", params.a}, {"b", params.b}, {"delta", params.delta}, {"c", params.c}, {"d", params.d}}}};
}

Scenario scenario_from_json(const Json& doc) {
  if (!doc.is_object()) throw DomainError("scenario must be a JSON object");
  Scenario s;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "model" && it.key() != "beta_amplitude" && it.key() != "params")
      throw DomainError("unknown scenario key '" + it.key() + "'");
  try {
    if (doc.contains("model")) s.model = doc.at("model").get<std::string>();
    if (doc.contains("beta_amplitude")) s.beta_amplitude = doc.at("beta_amplitude").get<double>();
    if (doc.contains("params")) {
      const Json& p = doc.at("params");
      if (!p.is_object()) throw DomainError("scenario params must be an object");
      for (auto it = p.begin(); it != p.end(); ++it) {
        const double v = it.value().get<double>();
        if (it.key() == "a") s.params.a = v;
        else if (it.key() == "b") s.params.b = v;
        else if (it.key() == "delta") s.params.delta = v;
        else if (it.key() == "c") s.params.c = v;
        else if (it.key() == "d") s.params.d = v;
        else throw DomainError("unknown scenario parameter '" + it.key() + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw DomainError("scenario '" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(doc);
}

}  // namespace reebflow::cli
