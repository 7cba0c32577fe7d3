#pragma once

// JSON ingestion of ExperimentSpec. Keys mirror the struct field names and
// unknown keys are rejected.

#include <set>
#include <string>

#include "json.hpp"

#include "anomsearch/harness.hpp"

namespace anomsearch {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw config_error("unknown key '" + it.key() + "' in " + where);
}

}  // namespace detail

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  detail::reject_unknown(j,
                         {"name", "K", "mu", "lambda", "policies", "b_grid", "trials", "seed", "sample_cap",
                          "placement", "bayes"},
                         "experiment spec");
  ExperimentSpec s;
  try {
    s.name = j.value("name", s.name);
    s.K = j.value("K", s.K);
    s.mu = j.value("mu", s.mu);
    s.lambda = j.value("lambda", s.lambda);
    if (j.contains("policies")) {
      s.policies.clear();
      for (const auto& p : j.at("policies")) s.policies.push_back(policy_from_string(p.get<std::string>()));
    }
    if (!j.contains("b_grid")) throw config_error("missing required key 'b_grid'");
    s.b_grid = j.at("b_grid").get<std::vector<double>>();
    s.trials = j.value("trials", s.trials);
    s.seed = j.value("seed", s.seed);
    s.sample_cap = j.value("sample_cap", s.sample_cap);
    if (j.contains("placement")) s.placement = placement_from_string(j.at("placement").get<std::string>());
    if (j.contains("bayes")) {
      const auto& b = j.at("bayes");
      if (!b.is_object()) throw config_error("'bayes' must be an object");
      detail::reject_unknown(b, {"pi_hat", "eps", "gamma_shape", "spread_is_sd"}, "bayes settings");
      s.bayes.pi_hat = b.value("pi_hat", s.bayes.pi_hat);
      s.bayes.eps = b.value("eps", s.bayes.eps);
      s.bayes.gamma_shape = b.value("gamma_shape", s.bayes.gamma_shape);
      s.bayes.spread_is_sd = b.value("spread_is_sd", s.bayes.spread_is_sd);
    }
    s.validate();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad config value: ") + e.what());
  } catch (const domain_error& e) {
    throw config_error(e.what());
  }
  return s;
}

inline nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["K"] = s.K;
  j["mu"] = s.mu;
  j["lambda"] = s.lambda;
  j["policies"] = nlohmann::json::array();
  for (Policy p : s.policies) j["policies"].push_back(to_string(p));
  j["b_grid"] = s.b_grid;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["sample_cap"] = s.sample_cap;
  j["placement"] = to_string(s.placement);
  j["bayes"] = {{"pi_hat", s.bayes.pi_hat},
                {"eps", s.bayes.eps},
                {"gamma_shape", s.bayes.gamma_shape},
                {"spread_is_sd", s.bayes.spread_is_sd}};
  return j;
}

inline ExperimentSpec load_spec(const std::string& path) {
  const std::string text = detail::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

}  // namespace anomsearch
