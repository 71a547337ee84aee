#include "gaudit/scoring.hpp"

#include <cmath>
#include <exception>

#include "gaudit/errors.hpp"
#include "gaudit/parallel.hpp"
#include "gaudit/store.hpp"
#include "gaudit/util.hpp"

namespace gaudit::scoring {

std::string_view to_string(ScorerKind k) {
  switch (k) {
    case ScorerKind::autoregressive: return "autoregressive";
    case ScorerKind::masked: return "masked";
    case ScorerKind::encoder_decoder: return "encoder_decoder";
    case ScorerKind::mock: return "mock";
    case ScorerKind::remote: return "remote";
  }
  return "";
}

ScorerKind scorer_kind_from_string(std::string_view name) {
  if (name == "autoregressive") return ScorerKind::autoregressive;
  if (name == "masked") return ScorerKind::masked;
  if (name == "encoder_decoder") return ScorerKind::encoder_decoder;
  if (name == "mock") return ScorerKind::mock;
  if (name == "remote") return ScorerKind::remote;
  throw ConfigError("unknown scorer kind '" + std::string(name) + "'");
}

std::string make_cache_key(const std::string& model_id,
                           const std::string& tokenizer_fingerprint,
                           const std::string& context, const std::string& completion,
                           const std::string& scorer_kind) {
  std::string canonical = "sk1";
  for (const std::string* part :
       {&model_id, &tokenizer_fingerprint, &context, &completion, &scorer_kind}) {
    canonical += '|';
    canonical += std::to_string(part->size());
    canonical += ':';
    canonical += *part;
  }
  return util::sha256_hex(canonical);
}

ScoreRecord score_completion(const Scorer& scorer, const probes::Probe& probe) {
  if (probe.context_text.empty())
    throw DomainError("score_completion: empty context");
  if (probe.completion_text.empty())
    throw TokenizationError("score_completion: completion yields zero tokens");

  const ScoreOutcome outcome = scorer.score(probe.context_text, probe.completion_text);
  if (!std::isfinite(outcome.log_prob))
    throw BackendError("score_completion: non-finite log_prob from backend", false);
  if (outcome.token_count < 1)
    throw TokenizationError("score_completion: completion yields zero tokens");

  ScoreRecord rec;
  rec.model_id = scorer.descriptor().model_id;
  rec.probe = probe;
  rec.log_prob = outcome.log_prob;
  rec.token_count = outcome.token_count;
  rec.scorer_kind = scorer.kind();
  rec.cache_key =
      make_cache_key(rec.model_id, scorer.descriptor().tokenizer_fingerprint,
                     probe.context_text, probe.completion_text, scorer.kind_label());
  return rec;
}

std::vector<ScoreRecord> score_batch(const Scorer& scorer,
                                     const std::vector<probes::Probe>& batch,
                                     store::ScoreStore& store) {
  if (batch.empty()) throw EmptySampleError("score_batch: no probes");

  const std::string& model_id = scorer.descriptor().model_id;
  const std::string& fingerprint = scorer.descriptor().tokenizer_fingerprint;
  const std::string kind = scorer.kind_label();

  const std::size_t n = batch.size();
  std::vector<ScoreRecord> records(n);
  std::vector<std::exception_ptr> failures(n);
  std::vector<std::size_t> pending;
  std::vector<char> fresh(n, 0);
  pending.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = make_cache_key(model_id, fingerprint, batch[i].context_text,
                                           batch[i].completion_text, kind);
    if (auto hit = store.get_score(key)) {
      records[i] = std::move(*hit);
    } else {
      pending.push_back(i);
      fresh[i] = 1;
    }
  }

  auto score_one = [&](std::size_t idx) {
    try {
      records[idx] = score_completion(scorer, batch[idx]);
    } catch (...) {
      failures[idx] = std::current_exception();
    }
  };
  if (scorer.concurrent_safe()) {
    par::parallel_for(pending.size(), [&](std::size_t p) { score_one(pending[p]); });
  } else {
    for (std::size_t idx : pending) score_one(idx);
  }

  // Persist in input order and stop at the first failure so the stored
  // prefix does not depend on how the batch was parallelized.
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) {
      try {
        std::rethrow_exception(failures[i]);
      } catch (const BackendError& e) {
        BackendError indexed(e.what(), e.retryable);
        indexed.probe_index = static_cast<long>(i);
        throw indexed;
      }
    }
    if (fresh[i]) store.put_score(records[i]);
  }
  return records;
}

namespace {

void check_prob(double p, const std::string& what) {
  if (!(p > 0.0) || p > 1.0)
    throw DomainError("mock scorer: " + what + " probability " +
                      util::format_g12(p) + " outside (0, 1]");
}

ModelDescriptor mock_descriptor(std::string model_id, std::int64_t parameter_count,
                                const std::string& config_digest) {
  ModelDescriptor d;
  d.model_id = std::move(model_id);
  d.family = "mock";
  d.parameter_count = parameter_count;
  d.architecture = nn::Arch::autoregressive;
  d.backend = "mock";
  d.tokenizer_fingerprint = "mock-" + config_digest;
  return d;
}

}  // namespace

MockScorer::MockScorer(TokenTable table, std::vector<double> default_token_probs,
                       ModelDescriptor descriptor)
    : table_(std::move(table)),
      default_token_probs_(std::move(default_token_probs)),
      descriptor_(std::move(descriptor)) {
  for (const auto& [key, probs] : table_) {
    if (probs.empty())
      throw DomainError("mock scorer: empty token probability list for completion '" +
                        key.second + "'");
    for (double p : probs) check_prob(p, "table");
  }
  if (default_token_probs_.empty())
    throw DomainError("mock scorer: empty default token probability list");
  for (double p : default_token_probs_) check_prob(p, "default");
}

ScoreOutcome MockScorer::score(const std::string& context,
                               const std::string& completion) const {
  count_invocation();
  const std::vector<double>* probs = &default_token_probs_;
  auto it = table_.find({context, completion});
  if (it != table_.end()) probs = &it->second;

  ScoreOutcome out;
  out.token_count = static_cast<long>(probs->size());
  out.token_log_probs.reserve(probs->size());
  for (double p : *probs) {
    out.token_log_probs.push_back(std::log(p));
    out.log_prob += out.token_log_probs.back();
  }
  return out;
}

std::shared_ptr<MockScorer> make_mock_scorer(
    const std::map<std::pair<std::string, std::string>, double>& table,
    double default_prob, std::string model_id) {
  MockScorer::TokenTable tokens;
  std::string canonical = "mock1";
  for (const auto& [key, p] : table) {
    check_prob(p, "table");
    tokens.emplace(key, std::vector<double>{p});
    canonical += '|' + key.first + '\x1f' + key.second + '\x1f' + util::format_g12(p);
  }
  check_prob(default_prob, "default");
  canonical += "|default=" + util::format_g12(default_prob);
  return std::make_shared<MockScorer>(
      std::move(tokens), std::vector<double>{default_prob},
      mock_descriptor(std::move(model_id), 1000000, util::sha256_hex(canonical)));
}

std::shared_ptr<MockScorer> make_mock_token_scorer(MockScorer::TokenTable table,
                                                   std::vector<double> default_tokens,
                                                   std::string model_id) {
  std::string canonical = "mock2";
  for (const auto& [key, probs] : table) {
    canonical += '|' + key.first + '\x1f' + key.second;
    for (double p : probs) canonical += '\x1f' + util::format_g12(p);
  }
  canonical += "|default";
  for (double p : default_tokens) canonical += '\x1f' + util::format_g12(p);
  return std::make_shared<MockScorer>(
      std::move(table), std::move(default_tokens),
      mock_descriptor(std::move(model_id), 1000000, util::sha256_hex(canonical)));
}

namespace {

// Deterministic hash-table mock with its probabilities derived on the fly.
class HashMockScorer : public MockScorer {
 public:
  HashMockScorer(std::string model_id, std::uint64_t seed,
                 std::int64_t parameter_count)
      : MockScorer({}, {0.5},
                   mock_descriptor(std::move(model_id), parameter_count,
                                   "hash-" + std::to_string(seed))),
        seed_(seed) {}

  ScoreOutcome score(const std::string& context,
                     const std::string& completion) const override {
    count_invocation();
    const std::uint64_t h =
        util::fnv1a64(context + '\x1f' + completion, seed_);
    // joint probability in [0.02, 0.98], one token per whitespace-split word
    const double joint =
        0.02 + 0.96 * (static_cast<double>(h % 1000003ull) / 1000002.0);
    long words = 1;
    for (char c : completion)
      if (c == ' ') ++words;

    ScoreOutcome out;
    out.token_count = words;
    const double per_token = std::log(joint) / static_cast<double>(words);
    out.token_log_probs.assign(static_cast<std::size_t>(words), per_token);
    out.log_prob = 0.0;
    for (double lp : out.token_log_probs) out.log_prob += lp;
    return out;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace

std::shared_ptr<MockScorer> make_hash_mock_scorer(std::string model_id,
                                                  std::uint64_t seed,
                                                  std::int64_t parameter_count) {
  return std::make_shared<HashMockScorer>(std::move(model_id), seed, parameter_count);
}

NativeScorer::NativeScorer(std::string model_id, nn::Arch arch,
                           nn::TransformerConfig cfg, bool masked_iterative)
    : model_(arch, cfg, tok::builtin_tokenizer()), masked_iterative_(masked_iterative) {
  descriptor_.model_id = std::move(model_id);
  descriptor_.family = "tiny";
  descriptor_.parameter_count = model_.parameter_count();
  descriptor_.architecture = arch;
  descriptor_.backend = "native";
  descriptor_.tokenizer_fingerprint = tok::builtin_tokenizer().fingerprint();
}

ScorerKind NativeScorer::kind() const {
  switch (model_.arch()) {
    case nn::Arch::autoregressive: return ScorerKind::autoregressive;
    case nn::Arch::masked: return ScorerKind::masked;
    case nn::Arch::encoder_decoder: return ScorerKind::encoder_decoder;
  }
  return ScorerKind::autoregressive;
}

std::string NativeScorer::kind_label() const {
  std::string label{to_string(kind())};
  if (model_.arch() == nn::Arch::masked && masked_iterative_) label += ":iterative";
  return label;
}

ScoreOutcome NativeScorer::score(const std::string& context,
                                 const std::string& completion) const {
  const tok::Tokenizer& tokenizer = model_.tokenizer();
  const std::vector<int> ctx_ids = tokenizer.encode(context);
  // single leading space so word-boundary tokens match natural continuation
  const std::vector<int> comp_ids = tokenizer.encode(" " + completion);
  if (comp_ids.empty())
    throw TokenizationError("native scorer: completion yields zero tokens");

  std::vector<double> token_logs;
  switch (model_.arch()) {
    case nn::Arch::autoregressive:
      token_logs = model_.score_autoregressive(ctx_ids, comp_ids);
      break;
    case nn::Arch::masked:
      token_logs = model_.score_masked(ctx_ids, comp_ids, masked_iterative_);
      break;
    case nn::Arch::encoder_decoder:
      token_logs = model_.score_encoder_decoder(ctx_ids, comp_ids);
      break;
  }

  ScoreOutcome out;
  out.token_count = static_cast<long>(token_logs.size());
  out.token_log_probs = std::move(token_logs);
  out.log_prob = 0.0;
  for (double lp : out.token_log_probs) out.log_prob += lp;
  return out;
}

std::shared_ptr<NativeScorer> make_native_scorer(std::string_view model_id,
                                                 bool masked_iterative) {
  const nn::NativePreset* preset = nn::find_native_preset(model_id);
  if (!preset)
    throw BackendError("no native model preset named '" + std::string(model_id) + "'",
                       false);
  return std::make_shared<NativeScorer>(preset->model_id, preset->arch, preset->cfg,
                                        masked_iterative);
}

}  // namespace gaudit::scoring
