#include "gaudit/store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gaudit/errors.hpp"
#include "gaudit/util.hpp"
#include "json.hpp"

namespace gaudit::store {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kConflictTolerance = 1e-9;

ordered_json record_to_json(const scoring::ScoreRecord& r) {
  return ordered_json{{"cache_key", r.cache_key},
                      {"model_id", r.model_id},
                      {"suite", std::string(probes::to_string(r.probe.suite))},
                      {"context_key", r.probe.context_key},
                      {"completion_key", r.probe.completion_key},
                      {"context_text", r.probe.context_text},
                      {"completion_text", r.probe.completion_text},
                      {"token_count", r.token_count},
                      {"log_prob", r.log_prob},
                      {"scorer_kind", std::string(scoring::to_string(r.scorer_kind))}};
}

scoring::ScoreRecord record_from_json(const json& j) {
  scoring::ScoreRecord r;
  r.cache_key = j.at("cache_key").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.probe.suite = probes::suite_from_string(j.at("suite").get<std::string>());
  r.probe.context_key = j.at("context_key").get<std::string>();
  r.probe.completion_key = j.at("completion_key").get<std::string>();
  r.probe.context_text = j.at("context_text").get<std::string>();
  r.probe.completion_text = j.at("completion_text").get<std::string>();
  r.token_count = j.at("token_count").get<long>();
  r.log_prob = j.at("log_prob").get<double>();
  r.scorer_kind = scoring::scorer_kind_from_string(j.at("scorer_kind").get<std::string>());
  return r;
}

ordered_json descriptor_to_json(const scoring::ModelDescriptor& d) {
  return ordered_json{{"model_id", d.model_id},
                      {"family", d.family},
                      {"parameter_count", d.parameter_count},
                      {"architecture", std::string(nn::to_string(d.architecture))},
                      {"backend", d.backend},
                      {"tokenizer_fingerprint", d.tokenizer_fingerprint}};
}

scoring::ModelDescriptor descriptor_from_json(const json& j) {
  scoring::ModelDescriptor d;
  d.model_id = j.at("model_id").get<std::string>();
  d.family = j.at("family").get<std::string>();
  d.parameter_count = j.at("parameter_count").get<std::int64_t>();
  const std::string arch = j.at("architecture").get<std::string>();
  if (arch == "autoregressive") d.architecture = nn::Arch::autoregressive;
  else if (arch == "masked") d.architecture = nn::Arch::masked;
  else if (arch == "encoder_decoder") d.architecture = nn::Arch::encoder_decoder;
  else throw SchemaError("manifest: unknown architecture '" + arch + "'");
  d.backend = j.at("backend").get<std::string>();
  d.tokenizer_fingerprint = j.at("tokenizer_fingerprint").get<std::string>();
  return d;
}

ordered_json manifest_to_ordered_json(const RunManifest& m) {
  return ordered_json{{"run_id", m.run_id},
                      {"model", descriptor_to_json(m.model)},
                      {"lexicon_version", m.lexicon_version},
                      {"suites", m.suites},
                      {"scorer_kind", m.scorer_kind},
                      {"masked_mode", m.masked_mode},
                      {"log_base", m.log_base},
                      {"leading_space_policy", m.leading_space_policy},
                      {"started_at", m.started_at},
                      {"finished_at", m.finished_at},
                      {"toolkit_version", m.toolkit_version},
                      {"cache_keys", m.cache_keys}};
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  return manifest_to_ordered_json(m).dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("manifest: not valid JSON: ") + e.what());
  }
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.model = descriptor_from_json(j.at("model"));
    m.lexicon_version = j.at("lexicon_version").get<std::string>();
    m.suites = j.at("suites").get<std::vector<std::string>>();
    m.scorer_kind = j.at("scorer_kind").get<std::string>();
    m.masked_mode = j.at("masked_mode").get<std::string>();
    m.log_base = j.at("log_base").get<std::string>();
    m.leading_space_policy = j.at("leading_space_policy").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    m.cache_keys = j.at("cache_keys").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string manifest_essence(const RunManifest& m) {
  RunManifest stripped = m;
  stripped.started_at.clear();
  stripped.finished_at.clear();
  return util::sha256_hex(manifest_to_json(stripped));
}

ScoreStore::ScoreStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec)
    throw StorageError("store: cannot create '" + root_.string() + "': " + ec.message());
  load();
}

std::filesystem::path ScoreStore::model_dir(const std::string& model_id) const {
  return root_ / util::sanitize_path_component(model_id);
}

void ScoreStore::load() {
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    const auto scores = entry.path() / "scores.jsonl";
    if (!std::filesystem::exists(scores)) continue;
    std::ifstream in(scores);
    if (!in) throw StorageError("store: cannot read '" + scores.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw StorageError("store: " + scores.string() + ":" +
                           std::to_string(line_no) + ": " + e.what());
      }
      scoring::ScoreRecord rec = record_from_json(j);
      index_[rec.cache_key] = std::move(rec);
    }
  }
}

void ScoreStore::put_score(const scoring::ScoreRecord& record) {
  if (record.cache_key.empty() || record.model_id.empty())
    throw InvariantError("store: record missing cache_key or model_id");
  if (!std::isfinite(record.log_prob))
    throw InvariantError("store: non-finite log_prob");
  if (record.token_count < 1)
    throw InvariantError("store: token_count must be >= 1");

  auto it = index_.find(record.cache_key);
  if (it != index_.end()) {
    if (std::fabs(it->second.log_prob - record.log_prob) > kConflictTolerance)
      throw ConflictError("store: cache key " + record.cache_key +
                          " already holds log_prob " +
                          util::format_g12(it->second.log_prob) +
                          ", refusing to overwrite with " +
                          util::format_g12(record.log_prob));
    return;  // idempotent re-put
  }

  const auto dir = model_dir(record.model_id);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw StorageError("store: cannot create '" + dir.string() + "': " + ec.message());
  const auto path = dir / "scores.jsonl";
  std::ofstream out(path, std::ios::app);
  if (!out) throw StorageError("store: cannot append to '" + path.string() + "'");
  out << record_to_json(record).dump() << "\n";
  out.flush();
  if (!out) throw StorageError("store: write failed on '" + path.string() + "'");
  index_[record.cache_key] = record;
}

std::optional<scoring::ScoreRecord> ScoreStore::get_score(
    const std::string& cache_key) const {
  auto it = index_.find(cache_key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ScoreStore::seal_run(const RunManifest& manifest) {
  if (manifest.run_id.empty()) throw InvariantError("store: manifest missing run_id");
  const auto dir = model_dir(manifest.model.model_id) / "runs";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw StorageError("store: cannot create '" + dir.string() + "': " + ec.message());
  const auto path = dir / (util::sanitize_path_component(manifest.run_id) + ".json");
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const RunManifest existing = manifest_from_json(buf.str());
    if (manifest_essence(existing) != manifest_essence(manifest))
      throw ConflictError("store: run " + manifest.run_id +
                          " already sealed with different contents");
    return;  // the first seal stands
  }
  std::ofstream out(path);
  if (!out) throw StorageError("store: cannot write '" + path.string() + "'");
  out << manifest_to_json(manifest);
  if (!out) throw StorageError("store: write failed on '" + path.string() + "'");
}

RunManifest ScoreStore::get_run(const std::string& run_id) const {
  const std::string name = util::sanitize_path_component(run_id) + ".json";
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    const auto path = entry.path() / "runs" / name;
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return manifest_from_json(buf.str());
  }
  throw UnknownRunError("store: no run named '" + run_id + "'");
}

std::vector<std::string> ScoreStore::list_runs() const {
  std::vector<std::string> runs;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    const auto dir = entry.path() / "runs";
    if (!std::filesystem::exists(dir)) continue;
    for (const auto& f : std::filesystem::directory_iterator(dir)) {
      if (f.path().extension() != ".json") continue;
      std::ifstream in(f.path());
      std::stringstream buf;
      buf << in.rdbuf();
      runs.push_back(manifest_from_json(buf.str()).run_id);
    }
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

void ScoreStore::export_scores(const std::string& run_id, std::ostream& csv,
                               std::ostream& jsonl) const {
  const RunManifest manifest = get_run(run_id);
  static const std::vector<std::string> header = {
      "run_id",       "model_id",        "suite",
      "context_key",  "completion_key",  "context_text",
      "completion_text", "token_count",  "log_prob"};
  csv << util::csv_row(header);
  for (const auto& key : manifest.cache_keys) {
    auto it = index_.find(key);
    if (it == index_.end())
      throw MissingScoreError("store: run " + run_id + " references cache key " + key +
                              " with no score on file");
    const scoring::ScoreRecord& r = it->second;
    const std::string log_prob = util::format_g12(r.log_prob);
    csv << util::csv_row({manifest.run_id, r.model_id,
                          std::string(probes::to_string(r.probe.suite)),
                          r.probe.context_key, r.probe.completion_key,
                          r.probe.context_text, r.probe.completion_text,
                          std::to_string(r.token_count), log_prob});
    jsonl << "{\"run_id\":" << json(manifest.run_id).dump()
          << ",\"model_id\":" << json(r.model_id).dump() << ",\"suite\":"
          << json(std::string(probes::to_string(r.probe.suite))).dump()
          << ",\"context_key\":" << json(r.probe.context_key).dump()
          << ",\"completion_key\":" << json(r.probe.completion_key).dump()
          << ",\"context_text\":" << json(r.probe.context_text).dump()
          << ",\"completion_text\":" << json(r.probe.completion_text).dump()
          << ",\"token_count\":" << r.token_count << ",\"log_prob\":" << log_prob
          << "}\n";
  }
}

std::vector<std::filesystem::path> ScoreStore::export_scores_to_dir(
    const std::string& run_id, const std::filesystem::path& out_dir) const {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw StorageError("store: cannot create '" + out_dir.string() +
                       "': " + ec.message());
  const std::string base = util::sanitize_path_component(run_id);
  const auto csv_path = out_dir / (base + ".csv");
  const auto jsonl_path = out_dir / (base + ".jsonl");
  std::ofstream csv(csv_path, std::ios::binary);
  std::ofstream jsonl(jsonl_path, std::ios::binary);
  if (!csv || !jsonl)
    throw StorageError("store: cannot write exports under '" + out_dir.string() + "'");
  export_scores(run_id, csv, jsonl);
  csv.flush();
  jsonl.flush();
  if (!csv || !jsonl)
    throw StorageError("store: export write failed under '" + out_dir.string() + "'");
  return {csv_path, jsonl_path};
}

}  // namespace gaudit::store
