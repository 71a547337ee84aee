#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gaudit/probes.hpp"
#include "gaudit/scoring.hpp"

namespace gaudit::config {

// Binds a model id to the scorer implementation serving it.
struct ModelBinding {
  std::string model_id;
  std::string backend;  // "native" | "mock" | "remote"
  std::string endpoint;  // remote only
  std::uint64_t seed = 1;  // mock only
  std::int64_t parameter_count = 1000000;  // mock descriptor value
};

struct AuditConfig {
  std::filesystem::path lexicon_path;
  std::vector<ModelBinding> models;
  std::vector<probes::Suite> suites;  // at least one, duplicates rejected
  // Restricts the folk-subversive view during analysis; scoring runs always
  // cover the full suites so cached records stay complete.
  std::vector<std::string> identifier_subset;
  std::string masked_mode = "single_pass";  // or "iterative"
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path out_dir = "out";
};

// Flag values layered over the config file; empty members leave the config
// untouched.
struct Overrides {
  std::vector<std::string> models;
  std::vector<std::string> suites;
  std::string cache_dir;
  std::string out_dir;
  std::string masked_mode;
  std::vector<std::string> identifier_subset;
};

// JSON document mirroring AuditConfig. Relative paths resolve against
// base_dir (the config file's directory). ConfigError / SchemaError on
// anything malformed.
AuditConfig parse_config(const std::string& text,
                         const std::filesystem::path& base_dir);
AuditConfig load_config_file(const std::filesystem::path& path);

// --model restricts to known ids (ConfigError otherwise), --suite replaces
// the suite list, the rest overwrite scalars.
void apply_overrides(AuditConfig& cfg, const Overrides& o);

bool masked_iterative(const AuditConfig& cfg);

// Instantiates the scorer a binding describes. Remote credentials come from
// the environment, never from the binding.
std::shared_ptr<scoring::Scorer> make_scorer(const ModelBinding& binding,
                                             bool masked_iterative);

}  // namespace gaudit::config
