#include "gaudit/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gaudit/errors.hpp"
#include "gaudit/remote.hpp"

namespace gaudit::config {

using nlohmann::ordered_json;

namespace {

std::string require_string(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw SchemaError(std::string("config: missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ModelBinding parse_model(const ordered_json& j) {
  if (!j.is_object()) throw SchemaError("config: model entry is not an object");
  ModelBinding m;
  m.model_id = require_string(j, "model_id");
  m.backend = require_string(j, "backend");
  if (m.backend != "native" && m.backend != "mock" && m.backend != "remote")
    throw ConfigError("config: model '" + m.model_id + "': unknown backend '" +
                      m.backend + "'");
  if (j.contains("endpoint")) m.endpoint = require_string(j, "endpoint");
  if (m.backend == "remote" && m.endpoint.empty())
    throw ConfigError("config: remote model '" + m.model_id + "' needs an endpoint");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      throw SchemaError("config: model '" + m.model_id + "': seed must be unsigned");
    m.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("parameter_count")) {
    if (!j.at("parameter_count").is_number_integer())
      throw SchemaError("config: model '" + m.model_id +
                        "': parameter_count must be an integer");
    m.parameter_count = j.at("parameter_count").get<std::int64_t>();
    if (m.parameter_count <= 0)
      throw ConfigError("config: model '" + m.model_id +
                        "': parameter_count must be positive");
  }
  return m;
}

std::vector<probes::Suite> parse_suites(const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("config: at least one suite is required");
  std::vector<probes::Suite> suites;
  for (const auto& name : names) {
    const probes::Suite s = probes::suite_from_string(name);
    if (std::find(suites.begin(), suites.end(), s) != suites.end())
      throw ConfigError("config: suite '" + name + "' listed twice");
    suites.push_back(s);
  }
  return suites;
}

void validate_masked_mode(const std::string& mode) {
  if (mode != "single_pass" && mode != "iterative")
    throw ConfigError("config: masked_mode must be 'single_pass' or 'iterative', got '" +
                      mode + "'");
}

}  // namespace

AuditConfig parse_config(const std::string& text,
                         const std::filesystem::path& base_dir) {
  auto j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw SchemaError("config: document is not a JSON object");

  AuditConfig cfg;
  cfg.lexicon_path = resolve(base_dir, require_string(j, "lexicon"));

  if (!j.contains("models") || !j.at("models").is_array() || j.at("models").empty())
    throw ConfigError("config: 'models' must be a non-empty array");
  for (const auto& entry : j.at("models")) {
    ModelBinding m = parse_model(entry);
    for (const auto& seen : cfg.models)
      if (seen.model_id == m.model_id)
        throw ConfigError("config: duplicate model id '" + m.model_id + "'");
    cfg.models.push_back(std::move(m));
  }

  std::vector<std::string> suite_names = {"sex_gender", "sex_baseline",
                                          "gender_illness"};
  if (j.contains("suites")) {
    if (!j.at("suites").is_array())
      throw SchemaError("config: 'suites' must be an array");
    suite_names.clear();
    for (const auto& s : j.at("suites")) {
      if (!s.is_string()) throw SchemaError("config: suite names must be strings");
      suite_names.push_back(s.get<std::string>());
    }
  }
  cfg.suites = parse_suites(suite_names);

  if (j.contains("identifier_subset")) {
    if (!j.at("identifier_subset").is_array())
      throw SchemaError("config: 'identifier_subset' must be an array");
    for (const auto& s : j.at("identifier_subset")) {
      if (!s.is_string())
        throw SchemaError("config: identifier_subset entries must be strings");
      cfg.identifier_subset.push_back(s.get<std::string>());
    }
  }

  if (j.contains("masked_mode")) cfg.masked_mode = require_string(j, "masked_mode");
  validate_masked_mode(cfg.masked_mode);

  cfg.cache_dir = resolve(base_dir, j.contains("cache_dir")
                                        ? require_string(j, "cache_dir")
                                        : "cache");
  cfg.out_dir =
      resolve(base_dir, j.contains("out_dir") ? require_string(j, "out_dir") : "out");
  return cfg;
}

AuditConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: not found (" + path.string() + ")");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

void apply_overrides(AuditConfig& cfg, const Overrides& o) {
  if (!o.models.empty()) {
    std::vector<ModelBinding> selected;
    for (const auto& id : o.models) {
      auto it = std::find_if(cfg.models.begin(), cfg.models.end(),
                             [&](const ModelBinding& m) { return m.model_id == id; });
      if (it == cfg.models.end())
        throw ConfigError("config: unknown model id '" + id + "'");
      selected.push_back(*it);
    }
    cfg.models = std::move(selected);
  }
  if (!o.suites.empty()) cfg.suites = parse_suites(o.suites);
  if (!o.cache_dir.empty()) cfg.cache_dir = o.cache_dir;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.masked_mode.empty()) {
    validate_masked_mode(o.masked_mode);
    cfg.masked_mode = o.masked_mode;
  }
  if (!o.identifier_subset.empty()) cfg.identifier_subset = o.identifier_subset;
}

bool masked_iterative(const AuditConfig& cfg) {
  return cfg.masked_mode == "iterative";
}

std::shared_ptr<scoring::Scorer> make_scorer(const ModelBinding& binding,
                                             bool masked_iterative) {
  if (binding.backend == "native")
    return scoring::make_native_scorer(binding.model_id, masked_iterative);
  if (binding.backend == "mock")
    return scoring::make_hash_mock_scorer(binding.model_id, binding.seed,
                                          binding.parameter_count);
  if (binding.backend == "remote")
    return remote::make_remote_scorer(binding.endpoint, binding.model_id);
  throw ConfigError("config: unknown backend '" + binding.backend + "'");
}

}  // namespace gaudit::config
