#include "spec_json.hpp"

#include <json.hpp>

namespace ids {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw std::invalid_argument(field + ": " + why);
}

double number_at(const json& obj, const std::string& field) {
  if (!obj.contains(field)) bad(field, "missing");
  const json& v = obj.at(field);
  if (!v.is_number()) bad(field, "must be a number");
  return v.get<double>();
}

Vec number_array(const json& v, const std::string& field, std::size_t expect) {
  if (!v.is_array()) bad(field, "must be an array");
  if (v.size() != expect) {
    bad(field, "expected " + std::to_string(expect) + " entries, got " +
                   std::to_string(v.size()));
  }
  Vec out;
  out.reserve(expect);
  for (std::size_t k = 0; k < expect; ++k) {
    if (!v[k].is_number()) bad(field + "[" + std::to_string(k) + "]", "must be a number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

RiskModel parse_risk_model(const json& rm, std::size_t n) {
  if (!rm.is_object()) bad("risk_model", "must be an object");
  if (!rm.contains("family")) bad("risk_model.family", "missing");
  if (!rm["family"].is_string()) bad("risk_model.family", "must be a string");
  const std::string family = rm["family"].get<std::string>();
  const json params = rm.contains("params") ? rm["params"] : json::object();
  if (!params.is_object()) bad("risk_model.params", "must be an object");

  if (family == "total_effort_exp") {
    TotalEffortExp te;
    te.alpha = params.contains("alpha") ? number_at(params, "alpha") : 1.0;
    te.beta = params.contains("beta") ? number_at(params, "beta") : 1.0;
    return te;
  }
  if (family == "weighted_effort_exp") {
    WeightedEffortExp we;
    if (!params.contains("alpha")) bad("risk_model.params.alpha", "missing");
    we.alphas = number_array(params["alpha"], "risk_model.params.alpha", n);
    if (!params.contains("weights")) bad("risk_model.params.weights", "missing");
    const json& w = params["weights"];
    if (!w.is_array() || w.size() != n) {
      bad("risk_model.params.weights", "must be an array of " + std::to_string(n) + " rows");
    }
    we.weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      we.weights.push_back(number_array(
          w[i], "risk_model.params.weights[" + std::to_string(i) + "]", n));
    }
    return we;
  }
  bad("risk_model.family",
      "unknown family \"" + family +
          "\"; supported: total_effort_exp, weighted_effort_exp");
}

void apply_solver_overrides(const json& s, SolverConfig& cfg) {
  if (!s.is_object()) bad("solver", "must be an object");
  for (const auto& [key, value] : s.items()) {
    const std::string field = "solver." + key;
    if (key == "gradient_tol") cfg.gradient_tol = number_at(s, key);
    else if (key == "max_iterations") cfg.max_iterations = static_cast<std::int64_t>(number_at(s, key));
    else if (key == "backtrack_shrink") cfg.backtrack_shrink = number_at(s, key);
    else if (key == "armijo") cfg.armijo = number_at(s, key);
    else if (key == "sweep_tol") cfg.sweep_tol = number_at(s, key);
    else if (key == "deviation_samples") cfg.deviation_samples = static_cast<std::int32_t>(number_at(s, key));
    else if (key == "bound_slack") cfg.bound_slack = number_at(s, key);
    else if (key == "lindahl_kkt_tol") cfg.lindahl_kkt_tol = number_at(s, key);
    else if (key == "dynamics_step") cfg.dynamics_step = number_at(s, key);
    else if (key == "dynamics_round_cap") cfg.dynamics_round_cap = static_cast<std::int64_t>(number_at(s, key));
    else bad(field, "unknown solver option");
    (void)value;
  }
}

}  // namespace

SpecDocument parse_spec_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("document: not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) bad("document", "top level must be an object");

  if (doc.contains("version")) {
    const json& v = doc["version"];
    const bool ok = (v.is_number_integer() && v.get<int>() == 1) ||
                    (v.is_string() && v.get<std::string>() == "1");
    if (!ok) bad("version", "unsupported (this tool reads version 1)");
  }

  if (!doc.contains("n")) bad("n", "missing");
  if (!doc["n"].is_number_integer() || doc["n"].get<std::int64_t>() < 1) {
    bad("n", "must be an integer >= 1");
  }
  const auto n = static_cast<std::size_t>(doc["n"].get<std::int64_t>());

  if (!doc.contains("costs")) bad("costs", "missing");
  Vec costs = number_array(doc["costs"], "costs", n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(costs[i] > 0.0)) {
      bad("costs[" + std::to_string(i) + "]",
          "must be > 0, got " + std::to_string(costs[i]));
    }
  }

  if (!doc.contains("risk_model")) bad("risk_model", "missing");
  RiskModel model = parse_risk_model(doc["risk_model"], n);

  SpecDocument out{GameSpec(std::move(costs), std::move(model)), SolverConfig{}, 0, false};

  if (doc.contains("solver")) apply_solver_overrides(doc["solver"], out.config);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0) {
      bad("seed", "must be a nonnegative integer");
    }
    out.seed = doc["seed"].get<std::uint64_t>();
    out.seed_present = true;
  }
  out.config.seed = out.seed;
  out.config.validate();
  return out;
}

}  // namespace ids
