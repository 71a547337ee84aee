#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gaudit/nn.hpp"
#include "gaudit/probes.hpp"

namespace gaudit::store {
class ScoreStore;
}

namespace gaudit::scoring {

enum class ScorerKind { autoregressive, masked, encoder_decoder, mock, remote };

std::string_view to_string(ScorerKind k);
ScorerKind scorer_kind_from_string(std::string_view name);

struct ModelDescriptor {
  std::string model_id;
  std::string family;
  std::int64_t parameter_count = 0;
  nn::Arch architecture = nn::Arch::autoregressive;
  std::string backend;  // binding, e.g. "native", "mock", "remote:<endpoint>"
  std::string tokenizer_fingerprint;
};

struct ScoreOutcome {
  double log_prob = 0.0;
  long token_count = 0;
  std::vector<double> token_log_probs;
};

struct ScoreRecord {
  std::string model_id;
  probes::Probe probe;
  double log_prob = 0.0;
  long token_count = 0;
  ScorerKind scorer_kind = ScorerKind::mock;
  std::string cache_key;
};

// Deterministic conditional scorer. Implementations must return identical
// outcomes for identical (context, completion) inputs.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual const ModelDescriptor& descriptor() const = 0;
  virtual ScorerKind kind() const = 0;
  // Label feeding cache keys; carries variant suffixes (e.g. masked:iterative)
  // so differently configured scorings never share a cache entry.
  virtual std::string kind_label() const { return std::string(to_string(kind())); }
  virtual bool concurrent_safe() const { return false; }
  virtual ScoreOutcome score(const std::string& context,
                             const std::string& completion) const = 0;
};

std::string make_cache_key(const std::string& model_id,
                           const std::string& tokenizer_fingerprint,
                           const std::string& context, const std::string& completion,
                           const std::string& scorer_kind);

ScoreRecord score_completion(const Scorer& scorer, const probes::Probe& probe);

// Scores every probe, serving cache hits from the store without invoking the
// scorer and persisting fresh records. Output order matches input order and
// is independent of the parallelism degree. On failure the successes that
// precede the first failing input index are persisted, then the error is
// rethrown carrying that index.
std::vector<ScoreRecord> score_batch(const Scorer& scorer,
                                     const std::vector<probes::Probe>& batch,
                                     store::ScoreStore& store);

// Mock backend: fixed probability tables plus an invocation counter so tests
// can assert cache behavior.
class MockScorer : public Scorer {
 public:
  using TokenTable = std::map<std::pair<std::string, std::string>, std::vector<double>>;

  MockScorer(TokenTable table, std::vector<double> default_token_probs,
             ModelDescriptor descriptor);

  const ModelDescriptor& descriptor() const override { return descriptor_; }
  ScorerKind kind() const override { return ScorerKind::mock; }
  bool concurrent_safe() const override { return true; }
  ScoreOutcome score(const std::string& context,
                     const std::string& completion) const override;

  std::uint64_t invocations() const { return invocations_.load(); }

 protected:
  void count_invocation() const {
    invocations_.fetch_add(1, std::memory_order_relaxed);
  }

 private:
  TokenTable table_;
  std::vector<double> default_token_probs_;
  ModelDescriptor descriptor_;
  mutable std::atomic<std::uint64_t> invocations_{0};
};

// Joint-probability table, every completion declared a single token.
std::shared_ptr<MockScorer> make_mock_scorer(
    const std::map<std::pair<std::string, std::string>, double>& table,
    double default_prob, std::string model_id = "mock");

// Per-token factorization table; joint probability is the product.
std::shared_ptr<MockScorer> make_mock_token_scorer(MockScorer::TokenTable table,
                                                   std::vector<double> default_tokens,
                                                   std::string model_id = "mock");

// Deterministic pseudo-random probabilities derived from (seed, context,
// completion); covers any suite without enumerating a table.
std::shared_ptr<MockScorer> make_hash_mock_scorer(std::string model_id,
                                                  std::uint64_t seed,
                                                  std::int64_t parameter_count = 1000000);

// Self-contained transformer backend over the builtin tokenizer.
class NativeScorer : public Scorer {
 public:
  NativeScorer(std::string model_id, nn::Arch arch, nn::TransformerConfig cfg,
               bool masked_iterative = false);

  const ModelDescriptor& descriptor() const override { return descriptor_; }
  ScorerKind kind() const override;
  std::string kind_label() const override;
  bool concurrent_safe() const override { return true; }
  ScoreOutcome score(const std::string& context,
                     const std::string& completion) const override;

  const nn::TinyLanguageModel& model() const { return model_; }

 private:
  nn::TinyLanguageModel model_;
  ModelDescriptor descriptor_;
  bool masked_iterative_;
};

// Preset lookup by model id; BackendError if unknown.
std::shared_ptr<NativeScorer> make_native_scorer(std::string_view model_id,
                                                 bool masked_iterative = false);

}  // namespace gaudit::scoring
