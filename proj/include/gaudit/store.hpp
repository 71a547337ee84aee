#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gaudit/scoring.hpp"

namespace gaudit::store {

struct RunManifest {
  std::string run_id;
  scoring::ModelDescriptor model;
  std::string lexicon_version;
  std::vector<std::string> suites;
  std::string scorer_kind;
  std::string masked_mode;  // "single_pass" | "iterative" | "" when not masked
  std::string log_base = "e";
  std::string leading_space_policy = "single_leading_space";
  std::string started_at;  // ISO 8601 UTC
  std::string finished_at;
  std::string toolkit_version;
  // Probe cache keys in suite order, so an export is a pure function of the
  // manifest plus the score log. Regenerating the suites from the same
  // lexicon version reproduces this list exactly.
  std::vector<std::string> cache_keys;
};

// Append-only score log, one directory per model id, with sealed run
// manifests alongside. Same-key writes must agree within 1e-9 or they are
// rejected, which turns backend nondeterminism into a hard error.
class ScoreStore {
 public:
  explicit ScoreStore(std::filesystem::path root);

  void put_score(const scoring::ScoreRecord& record);
  std::optional<scoring::ScoreRecord> get_score(const std::string& cache_key) const;
  std::size_t size() const { return index_.size(); }

  // First seal wins: re-sealing an identical run is a no-op, a conflicting
  // manifest under the same run id is an error.
  void seal_run(const RunManifest& manifest);
  RunManifest get_run(const std::string& run_id) const;
  std::vector<std::string> list_runs() const;

  void export_scores(const std::string& run_id, std::ostream& csv,
                     std::ostream& jsonl) const;
  // Writes <run_id>.csv and <run_id>.jsonl into out_dir; returns the paths.
  std::vector<std::filesystem::path> export_scores_to_dir(
      const std::string& run_id, const std::filesystem::path& out_dir) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path model_dir(const std::string& model_id) const;
  void load();

  std::filesystem::path root_;
  std::unordered_map<std::string, scoring::ScoreRecord> index_;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

// Fingerprint of the fields that define a run's identity (everything except
// the timestamps); equal fingerprints mean the same logical run.
std::string manifest_essence(const RunManifest& m);

}  // namespace gaudit::store
