#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fairbandit/errors.hpp"
#include "fairbandit/experiment.hpp"

namespace fairbandit {
namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

const json& require(const json& object, const std::string& path, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

const json& require_object(const json& value, const std::string& path) {
  if (!value.is_object()) throw ConfigError(path, "expected an object");
  return value;
}

const json& require_array(const json& value, const std::string& path) {
  if (!value.is_array()) throw ConfigError(path, "expected an array");
  return value;
}

Rational rational_field(const json& value, const std::string& path) {
  if (value.is_number_integer()) return Rational(value.get<long long>());
  if (!value.is_string()) throw ConfigError(path, "expected a rational string such as \"3/4\"");
  try {
    return parse_rational(value.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

std::size_t count_field(const json& value, const std::string& path, std::size_t minimum) {
  if (!value.is_number_integer() || value.get<long long>() < static_cast<long long>(minimum)) {
    throw ConfigError(path, "expected an integer >= " + std::to_string(minimum));
  }
  return value.get<std::size_t>();
}

double real_field(const json& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError(path, "expected a number");
  return value.get<double>();
}

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

EnvironmentSpec parse_environment(const json& node) {
  const std::string path = "environment";
  require_object(node, path);
  reject_unknown(node, path, {"contexts", "means", "noise"});

  EnvironmentSpec spec;
  const auto& contexts = require_array(require(node, path, "contexts"), path + ".contexts");
  for (std::size_t s = 0; s < contexts.size(); ++s) {
    const std::string cpath = indexed(path + ".contexts", s);
    const auto& c = require_object(contexts[s], cpath);
    reject_unknown(c, cpath, {"label", "prob"});
    const auto& label = require(c, cpath, "label");
    if (!label.is_string() || label.get<std::string>().empty()) throw ConfigError(cpath + ".label", "expected a nonempty string");
    const auto text = label.get<std::string>();
    if (text.find_first_of(",\"\n\r") != std::string::npos) {
      throw ConfigError(cpath + ".label", "labels may not contain commas, quotes or newlines");
    }
    spec.labels.push_back(text);
    spec.context_probs.push_back(rational_field(require(c, cpath, "prob"), cpath + ".prob"));
  }

  const auto& means = require_array(require(node, path, "means"), path + ".means");
  for (std::size_t s = 0; s < means.size(); ++s) {
    const auto& row = require_array(means[s], indexed(path + ".means", s));
    RationalVector values;
    for (std::size_t a = 0; a < row.size(); ++a) {
      values.push_back(rational_field(row[a], indexed(indexed(path + ".means", s), a)));
    }
    spec.means.push_back(std::move(values));
  }

  if (auto it = node.find("noise"); it != node.end()) {
    if (!it->is_string()) throw ConfigError(path + ".noise", "expected \"bernoulli\" or \"fixed\"");
    try {
      spec.noise = parse_noise_model(it->get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ".noise", e.what());
    }
  }
  return spec;
}

void parse_fairness(const json& node, std::size_t arms, ExperimentConfig& config) {
  const std::string path = "fairness";
  require_object(node, path);
  reject_unknown(node, path, {"arms", "groups", "lower", "upper"});
  if (auto it = node.find("arms"); it != node.end()) {
    if (count_field(*it, path + ".arms", 1) != arms) {
      throw ConfigError(path + ".arms", "does not match the number of arms in environment.means");
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  const auto& gnode = require_array(require(node, path, "groups"), path + ".groups");
  for (std::size_t i = 0; i < gnode.size(); ++i) {
    const auto& members = require_array(gnode[i], indexed(path + ".groups", i));
    std::vector<std::size_t> group;
    for (std::size_t j = 0; j < members.size(); ++j) {
      group.push_back(count_field(members[j], indexed(indexed(path + ".groups", i), j), 0));
    }
    groups.push_back(std::move(group));
  }
  try {
    config.structure = GroupStructure(arms, std::move(groups));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".groups", e.what());
  }

  auto bound_list = [&](const char* key) {
    RationalVector out;
    auto it = node.find(key);
    if (it == node.end()) {
      if (config.structure.group_count() == 0) return out;
      throw ConfigError(path + "." + key, "missing required field");
    }
    const auto& arr = require_array(*it, path + "." + key);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(rational_field(arr[i], indexed(path + "." + key, i)));
    if (out.size() != config.structure.group_count()) {
      throw ConfigError(path + "." + key, "expected one entry per group");
    }
    return out;
  };
  RationalVector lower = bound_list("lower");
  RationalVector upper = bound_list("upper");
  try {
    config.bounds = FairnessBounds(std::move(lower), std::move(upper));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

PolicyConfig parse_policy(const json& node, const std::string& path) {
  require_object(node, path);
  reject_unknown(node, path, {"kind", "name", "delta", "width_scale", "epsilon0"});
  PolicyConfig policy;
  const auto& kind = require(node, path, "kind");
  if (!kind.is_string()) throw ConfigError(path + ".kind", "expected a string");
  try {
    policy.kind = parse_policy_kind(kind.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".kind", e.what());
  }
  policy.name = std::string(to_string(policy.kind));
  if (auto it = node.find("name"); it != node.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) throw ConfigError(path + ".name", "expected a nonempty string");
    policy.name = it->get<std::string>();
    if (policy.name.find_first_of(",\"/\\\n\r ") != std::string::npos) {
      throw ConfigError(path + ".name", "names may not contain commas, quotes, slashes or whitespace");
    }
  }
  if (auto it = node.find("delta"); it != node.end()) policy.params.confidence.delta = real_field(*it, path + ".delta");
  if (auto it = node.find("width_scale"); it != node.end()) {
    policy.params.confidence.width_scale = real_field(*it, path + ".width_scale");
  }
  if (auto it = node.find("epsilon0"); it != node.end()) policy.params.epsilon0 = real_field(*it, path + ".epsilon0");
  try {
    validate(policy.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return policy;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("syntax error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("", "top level must be an object");
  reject_unknown(root, "", {"environment", "fairness", "policy", "policies", "horizon", "replications", "seed",
                            "checkpoints", "output_dir", "trace_every"});

  ExperimentConfig config;
  config.environment = parse_environment(require(root, "", "environment"));
  if (config.environment.means.empty() || config.environment.means.front().empty()) {
    throw ConfigError("environment.means", "at least one context row with one arm is required");
  }
  parse_fairness(require(root, "", "fairness"), config.environment.means.front().size(), config);

  const bool single = root.contains("policy");
  const bool multiple = root.contains("policies");
  if (single == multiple) throw ConfigError("policies", "give exactly one of \"policy\" or \"policies\"");
  if (single) {
    config.policies.push_back(parse_policy(root["policy"], "policy"));
  } else {
    const auto& list = require_array(root["policies"], "policies");
    if (list.empty()) throw ConfigError("policies", "at least one policy is required");
    for (std::size_t i = 0; i < list.size(); ++i) config.policies.push_back(parse_policy(list[i], indexed("policies", i)));
  }
  std::set<std::string> names;
  for (const auto& p : config.policies) {
    if (!names.insert(p.name).second) throw ConfigError("policies", "duplicate policy name '" + p.name + "'");
  }

  config.horizon = count_field(require(root, "", "horizon"), "horizon", 1);
  config.replications = count_field(require(root, "", "replications"), "replications", 1);
  if (auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    config.seed = it->get<std::uint64_t>();
  }
  if (auto it = root.find("checkpoints"); it != root.end()) {
    const auto& list = require_array(*it, "checkpoints");
    for (std::size_t i = 0; i < list.size(); ++i) config.checkpoints.push_back(count_field(list[i], indexed("checkpoints", i), 1));
    if (!std::is_sorted(config.checkpoints.begin(), config.checkpoints.end()) ||
        std::adjacent_find(config.checkpoints.begin(), config.checkpoints.end()) != config.checkpoints.end()) {
      throw ConfigError("checkpoints", "must be strictly increasing");
    }
    if (!config.checkpoints.empty() && config.checkpoints.back() > config.horizon) {
      throw ConfigError("checkpoints", "must not exceed the horizon");
    }
  } else {
    config.checkpoints.push_back(config.horizon);
  }
  if (auto it = root.find("output_dir"); it != root.end()) {
    if (!it->is_string()) throw ConfigError("output_dir", "expected a string");
    config.output_dir = it->get<std::string>();
  }
  if (auto it = root.find("trace_every"); it != root.end()) config.trace_every = count_field(*it, "trace_every", 1);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace fairbandit
