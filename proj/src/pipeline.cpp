#include "gaudit/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <set>

#include "json.hpp"

#include "gaudit/errors.hpp"
#include "gaudit/metrics.hpp"
#include "gaudit/report.hpp"
#include "gaudit/store.hpp"
#include "gaudit/util.hpp"

namespace gaudit::pipeline {

using nlohmann::ordered_json;

namespace {

constexpr const char* kToolkitVersion = "gaudit 0.1.0";

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
}

std::vector<std::string> suite_names(const std::vector<probes::Suite>& suites) {
  std::vector<std::string> names;
  for (probes::Suite s : suites) names.emplace_back(probes::to_string(s));
  return names;
}

std::size_t expected_suite_size(const lexicon::Lexicon& lex, probes::Suite s) {
  switch (s) {
    case probes::Suite::sex_gender:
      return lex.sex_characteristics.size() * lex.gender_identifiers.size();
    case probes::Suite::sex_baseline:
      return lex.sex_characteristics.size() * lex.baseline_nouns.size();
    case probes::Suite::gender_illness:
      return lex.gender_identifiers.size() * lex.illnesses.size();
  }
  throw ConfigError("unknown suite");
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const InvariantError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const TokenizationError*>(&e) ||
      dynamic_cast<const LengthMismatchError*>(&e))
    return kExitConfig;
  if (dynamic_cast<const BackendError*>(&e) || dynamic_cast<const StorageError*>(&e) ||
      dynamic_cast<const ConflictError*>(&e))
    return kExitBackend;
  if (dynamic_cast<const MissingScoreError*>(&e) ||
      dynamic_cast<const UnknownRunError*>(&e) ||
      dynamic_cast<const EmptySampleError*>(&e) ||
      dynamic_cast<const DegenerateError*>(&e) ||
      dynamic_cast<const InsufficientDataError*>(&e) ||
      dynamic_cast<const ReportError*>(&e))
    return kExitMissingData;
  return kExitUnexpected;
}

std::string make_run_id(const std::string& model_id, const std::string& kind_label,
                        const std::string& tokenizer_fingerprint,
                        const std::string& lexicon_digest,
                        const std::vector<probes::Suite>& suites) {
  const std::string material = "run1|" + model_id + "|" + kind_label + "|" +
                               tokenizer_fingerprint + "|" + lexicon_digest + "|" +
                               util::join(suite_names(suites), ",");
  return "run-" + util::sha256_hex(material).substr(0, 16);
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const config::AuditConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  std::vector<std::string> errors;
  ordered_json report{{"ok", true}};

  lexicon::Lexicon lex;
  bool have_lexicon = false;
  if (!std::filesystem::exists(cfg.lexicon_path)) {
    errors.push_back("lexicon: not found (" + cfg.lexicon_path.string() + ")");
  } else {
    try {
      lex = lexicon::load_lexicon_file(cfg.lexicon_path);
      have_lexicon = true;
      report["lexicon"] = ordered_json{{"path", cfg.lexicon_path.string()},
                                       {"version", lex.version}};
    } catch (const Error& e) {
      errors.push_back(std::string("lexicon: ") + e.what());
    }
  }

  if (have_lexicon) {
    ordered_json sizes = ordered_json::object();
    for (probes::Suite s : cfg.suites) {
      const auto probes_for_suite = probes::generate_suite(lex, s);
      const std::size_t expected = expected_suite_size(lex, s);
      sizes[std::string(probes::to_string(s))] = probes_for_suite.size();
      if (probes_for_suite.size() != expected)
        errors.push_back("suite " + std::string(probes::to_string(s)) + ": generated " +
                         std::to_string(probes_for_suite.size()) + " probes, expected " +
                         std::to_string(expected));
    }
    report["suite_sizes"] = sizes;
  }

  ordered_json models = ordered_json::array();
  for (const auto& binding : cfg.models) {
    try {
      const auto scorer = config::make_scorer(binding, config::masked_iterative(cfg));
      models.push_back(ordered_json{
          {"model_id", binding.model_id},
          {"backend", binding.backend},
          {"kind", std::string(scoring::to_string(scorer->kind()))},
          {"parameter_count", scorer->descriptor().parameter_count}});
    } catch (const Error& e) {
      errors.push_back("model '" + binding.model_id + "': " + e.what());
    }
  }
  report["models"] = models;
  report["masked_mode"] = cfg.masked_mode;

  report["ok"] = errors.empty();
  report["errors"] = errors;
  out << report.dump(2) << "\n";
  if (!errors.empty()) {
    for (const auto& e : errors) err << "error: " << e << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

int cmd_run(const config::AuditConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto lex = lexicon::load_lexicon_file(cfg.lexicon_path);
    const std::string digest = util::sha256_hex(lexicon::serialize(lex));

    std::vector<probes::Probe> all_probes;
    for (probes::Suite s : cfg.suites) {
      const auto suite = probes::generate_suite(lex, s);
      all_probes.insert(all_probes.end(), suite.begin(), suite.end());
    }

    store::ScoreStore st(cfg.cache_dir);
    for (const auto& binding : cfg.models) {
      const auto scorer = config::make_scorer(binding, config::masked_iterative(cfg));
      const std::size_t before = st.size();

      store::RunManifest manifest;
      manifest.run_id = make_run_id(binding.model_id, scorer->kind_label(),
                                    scorer->descriptor().tokenizer_fingerprint, digest,
                                    cfg.suites);
      manifest.model = scorer->descriptor();
      manifest.lexicon_version = lex.version;
      manifest.suites = suite_names(cfg.suites);
      manifest.scorer_kind = std::string(scoring::to_string(scorer->kind()));
      manifest.masked_mode =
          scorer->kind() == scoring::ScorerKind::masked ? cfg.masked_mode : "";
      manifest.toolkit_version = kToolkitVersion;
      manifest.started_at = util::iso8601_utc_now();

      const auto records = scoring::score_batch(*scorer, all_probes, st);
      for (const auto& r : records) manifest.cache_keys.push_back(r.cache_key);

      manifest.finished_at = util::iso8601_utc_now();
      st.seal_run(manifest);

      err << "model " << binding.model_id << ": " << records.size() << " probes, "
          << (st.size() - before) << " newly scored, "
          << (records.size() - (st.size() - before)) << " from cache\n";
      out << binding.model_id << " " << manifest.run_id << "\n";
    }
  });
}

// ---------------------------------------------------------------------------
// analyze

namespace {

std::vector<std::string> sorted_runs(const store::ScoreStore& st) {
  auto runs = st.list_runs();
  std::sort(runs.begin(), runs.end());
  return runs;
}

void append_run_records(const store::ScoreStore& st, const store::RunManifest& m,
                        std::set<std::string>& seen, report::ModelRunData& data) {
  for (const auto& key : m.cache_keys) {
    if (!seen.insert(key).second) continue;
    const auto rec = st.get_score(key);
    if (!rec)
      throw MissingScoreError("run " + m.run_id + ": no score on file for cache key " +
                              key);
    switch (rec->probe.suite) {
      case probes::Suite::sex_gender: data.sex_gender.push_back(*rec); break;
      case probes::Suite::sex_baseline: data.sex_baseline.push_back(*rec); break;
      case probes::Suite::gender_illness: data.gender_illness.push_back(*rec); break;
    }
  }
}

}  // namespace

int cmd_analyze(const config::AuditConfig& cfg, const std::vector<std::string>& run_ids,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto lex = lexicon::load_lexicon_file(cfg.lexicon_path);
    const store::ScoreStore st(cfg.cache_dir);

    std::set<std::string> requested(run_ids.begin(), run_ids.end());
    std::set<std::string> found;

    std::vector<report::ModelRunData> runs;
    for (const auto& binding : cfg.models) {
      report::ModelRunData data;
      std::set<std::string> seen_keys;
      bool have_model = false;
      for (const auto& run_id : sorted_runs(st)) {
        if (!requested.empty() && !requested.count(run_id)) continue;
        const auto manifest = st.get_run(run_id);
        if (manifest.model.model_id != binding.model_id) continue;
        if (!manifest.masked_mode.empty() && manifest.masked_mode != cfg.masked_mode) {
          err << "notice: run " << run_id << " used masked_mode "
              << manifest.masked_mode << ", not " << cfg.masked_mode << "; skipping\n";
          continue;
        }
        found.insert(run_id);
        if (!have_model) {
          data.model = manifest.model;
          have_model = true;
        }
        append_run_records(st, manifest, seen_keys, data);
      }
      if (!have_model) {
        err << "notice: model " << binding.model_id << ": no sealed runs; skipping\n";
        continue;
      }
      const struct {
        const char* name;
        bool empty;
      } coverage[] = {{"sex_gender", data.sex_gender.empty()},
                      {"sex_baseline", data.sex_baseline.empty()},
                      {"gender_illness", data.gender_illness.empty()}};
      for (const auto& c : coverage)
        if (c.empty)
          err << "notice: model " << binding.model_id << ": no " << c.name
              << " records; skipping its views\n";
      runs.push_back(std::move(data));
    }

    for (const auto& id : run_ids)
      if (!found.count(id)) throw UnknownRunError("analyze: no sealed run '" + id + "'");

    const auto tables = report::build_tables(lex, runs);
    const bool empty = tables.gender_probabilities.empty() && tables.folk.empty() &&
                       tables.sex_gender.empty() && tables.gender_illness.empty() &&
                       tables.baselines.empty() && tables.size_trend.empty();
    if (empty) throw ReportError("analyze: no views renderable from the selected runs");
    const auto table_paths = report::write_tables(tables, cfg.out_dir / "tables");
    const auto figure_paths = report::render_figures(tables, cfg.out_dir / "figures");

    for (const auto& run : runs) {
      const std::string& id = run.model.model_id;
      auto count = [&](const auto& rows) {
        return std::count_if(rows.begin(), rows.end(),
                             [&](const auto& r) { return r.model_id == id; });
      };
      out << id << ": folk_subversive=" << count(tables.folk)
          << " sex_gender=" << count(tables.sex_gender)
          << " gender_illness=" << count(tables.gender_illness)
          << " baseline_medians=" << count(tables.baselines)
          << " mental_physical=" << count(tables.mental_physical) << "\n";
      if (!cfg.identifier_subset.empty() && !run.sex_gender.empty()) {
        const auto restricted =
            metrics::folk_subversive_lpr(run.sex_gender, lex, cfg.identifier_subset);
        out << id << ": folk_subversive[" << util::join(cfg.identifier_subset, ",")
            << "]=" << util::format_g12(restricted.value) << "\n";
      }
    }
    out << "tables=" << table_paths.size() << " figures=" << figure_paths.size()
        << " out=" << cfg.out_dir.string() << "\n";
  });
}

// ---------------------------------------------------------------------------
// export

int cmd_export(const config::AuditConfig& cfg, const std::vector<std::string>& run_ids,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const store::ScoreStore st(cfg.cache_dir);
    std::vector<std::string> ids = run_ids;
    if (ids.empty()) {
      ids = sorted_runs(st);
      if (ids.empty()) throw UnknownRunError("export: no sealed runs in the store");
    }
    for (const auto& id : ids) {
      const auto paths = st.export_scores_to_dir(id, cfg.out_dir / "exports");
      for (const auto& p : paths) out << p.string() << "\n";
    }
  });
}

}  // namespace gaudit::pipeline
