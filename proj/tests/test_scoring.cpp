#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "gaudit/errors.hpp"
#include "gaudit/parallel.hpp"
#include "gaudit/scoring.hpp"
#include "gaudit/store.hpp"

using namespace gaudit;
using namespace gaudit::scoring;

namespace {

probes::Probe make_probe(std::string ctx, std::string comp) {
  return probes::Probe{probes::Suite::sex_gender, std::move(ctx), std::move(comp),
                       "k", "v"};
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("gaudit_scoring_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

// Fails on one completion; everything else scores log(0.5).
class FailingScorer : public Scorer {
 public:
  explicit FailingScorer(std::string poison) : poison_(std::move(poison)) {
    descriptor_.model_id = "failing-mock";
    descriptor_.backend = "mock";
    descriptor_.tokenizer_fingerprint = "f";
  }
  const ModelDescriptor& descriptor() const override { return descriptor_; }
  ScorerKind kind() const override { return ScorerKind::mock; }
  bool concurrent_safe() const override { return true; }
  ScoreOutcome score(const std::string&, const std::string& completion) const override {
    if (completion == poison_)
      throw BackendError("backend refused completion '" + completion + "'", true);
    return ScoreOutcome{std::log(0.5), 1, {std::log(0.5)}};
  }

 private:
  std::string poison_;
  ModelDescriptor descriptor_;
};

struct ModeGuard {
  par::Mode saved;
  ModeGuard() : saved(par::mode()) {}
  ~ModeGuard() { par::set_mode(saved); }
};

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("mock table scorer returns the configured joint probability") {
  auto mock = make_mock_scorer({{{"ctx", "word"}, 0.04}}, 0.001);
  SUBCASE("tabled pair") {
    const auto out = mock->score("ctx", "word");
    CHECK(out.log_prob == doctest::Approx(std::log(0.04)).epsilon(1e-12));
    CHECK(out.token_count == 1);
    REQUIRE(out.token_log_probs.size() == 1);
    CHECK(out.token_log_probs[0] == out.log_prob);
  }
  SUBCASE("default applies to unlisted pairs") {
    const auto out = mock->score("ctx", "other");
    CHECK(out.log_prob == doctest::Approx(std::log(0.001)).epsilon(1e-12));
  }
  SUBCASE("invocations are counted") {
    CHECK(mock->invocations() == 0);
    (void)mock->score("a", "b");
    (void)mock->score("c", "d");
    CHECK(mock->invocations() == 2);
  }
}

TEST_CASE("token mock multiplies per-token probabilities") {
  MockScorer::TokenTable table;
  table[{"ctx", "three words here"}] = {0.5, 0.2, 0.1};
  auto mock = make_mock_token_scorer(std::move(table), {0.25});
  const auto out = mock->score("ctx", "three words here");
  CHECK(out.log_prob == doctest::Approx(std::log(0.01)).epsilon(1e-9));
  CHECK(out.token_count == 3);
  REQUIRE(out.token_log_probs.size() == 3);
  CHECK(out.token_log_probs[0] == doctest::Approx(std::log(0.5)));
  const auto fallback = mock->score("ctx", "unlisted");
  CHECK(fallback.log_prob == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK(fallback.token_count == 1);
}

TEST_CASE("zero and out-of-range probabilities are domain errors") {
  CHECK_THROWS_AS(make_mock_scorer({{{"c", "w"}, 0.0}}, 0.5)->score("c", "w"),
                  DomainError);
  CHECK_THROWS_AS(make_mock_scorer({{{"c", "w"}, -0.1}}, 0.5)->score("c", "w"),
                  DomainError);
  CHECK_THROWS_AS(make_mock_scorer({{{"c", "w"}, 1.5}}, 0.5)->score("c", "w"),
                  DomainError);
  CHECK_THROWS_AS(make_mock_scorer({}, 0.0)->score("c", "w"), DomainError);
}

TEST_CASE("hash mock is deterministic and well-formed") {
  auto a = make_hash_mock_scorer("hm", 42);
  auto b = make_hash_mock_scorer("hm", 42);
  auto c = make_hash_mock_scorer("hm", 43);
  double differed = 0.0;
  for (const char* ctx : {"alpha", "beta", "gamma"})
    for (const char* comp : {"one", "two", "three"}) {
      const auto oa = a->score(ctx, comp);
      const auto ob = b->score(ctx, comp);
      const auto oc = c->score(ctx, comp);
      CHECK(oa.log_prob == ob.log_prob);
      CHECK(oa.log_prob < 0.0);
      CHECK(std::isfinite(oa.log_prob));
      if (oa.log_prob != oc.log_prob) differed += 1.0;
    }
  CHECK(differed > 0.0);  // the seed matters
}

TEST_CASE("cache key depends on every input") {
  const std::string base = make_cache_key("m", "fp", "ctx", "comp", "mock");
  CHECK(base.size() == 64);
  CHECK(base != make_cache_key("m2", "fp", "ctx", "comp", "mock"));
  CHECK(base != make_cache_key("m", "fp2", "ctx", "comp", "mock"));
  CHECK(base != make_cache_key("m", "fp", "ctx2", "comp", "mock"));
  CHECK(base != make_cache_key("m", "fp", "ctx", "comp2", "mock"));
  CHECK(base != make_cache_key("m", "fp", "ctx", "comp", "masked"));
  CHECK(base == make_cache_key("m", "fp", "ctx", "comp", "mock"));
  // Field boundaries are length-delimited, not separator-delimited.
  CHECK(make_cache_key("ab", "c", "x", "y", "k") !=
        make_cache_key("a", "bc", "x", "y", "k"));
}

TEST_CASE("score_completion fills the record") {
  auto mock = make_mock_scorer({{{"the ctx", "w"}, 0.125}}, 0.5, "rec-model");
  const auto rec = score_completion(*mock, make_probe("the ctx", "w"));
  CHECK(rec.model_id == "rec-model");
  CHECK(rec.log_prob == doctest::Approx(std::log(0.125)).epsilon(1e-12));
  CHECK(rec.token_count == 1);
  CHECK(rec.scorer_kind == ScorerKind::mock);
  CHECK(rec.cache_key ==
        make_cache_key("rec-model", mock->descriptor().tokenizer_fingerprint,
                       "the ctx", "w", "mock"));
  CHECK(rec.probe.context_text == "the ctx");
  CHECK(rec.probe.completion_text == "w");
}

TEST_CASE("score_batch serves warm runs from the store") {
  TempDir dir("warm");
  store::ScoreStore st(dir.path);
  auto mock = make_mock_scorer({}, 0.25, "batch-model");
  std::vector<probes::Probe> batch;
  for (int i = 0; i < 12; ++i)
    batch.push_back(make_probe("ctx " + std::to_string(i), "comp"));

  const auto cold = score_batch(*mock, batch, st);
  CHECK(mock->invocations() == 12);
  REQUIRE(cold.size() == 12);
  CHECK(st.size() == 12);

  const auto warm = score_batch(*mock, batch, st);
  CHECK(mock->invocations() == 12);  // untouched
  REQUIRE(warm.size() == 12);
  for (size_t i = 0; i < warm.size(); ++i) {
    CHECK(warm[i].cache_key == cold[i].cache_key);
    CHECK(warm[i].log_prob == cold[i].log_prob);
    CHECK(warm[i].token_count == cold[i].token_count);
  }

  SUBCASE("a mixed batch only scores the new probes") {
    auto extended = batch;
    extended.push_back(make_probe("fresh", "comp"));
    const auto mixed = score_batch(*mock, extended, st);
    CHECK(mock->invocations() == 13);
    CHECK(mixed.size() == 13);
    CHECK(st.size() == 13);
  }
}

TEST_CASE("score_batch failure persists the prefix and reports the index") {
  TempDir dir("fail");
  store::ScoreStore st(dir.path);
  FailingScorer scorer("poisoned");
  std::vector<probes::Probe> batch = {
      make_probe("c0", "fine"),    make_probe("c1", "fine"),
      make_probe("c2", "poisoned"), make_probe("c3", "fine"),
      make_probe("c4", "poisoned")};

  try {
    score_batch(scorer, batch, st);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.probe_index == 2);
    CHECK(e.retryable);
  }
  CHECK(st.size() == 2);  // c0 and c1 persisted, nothing at or past the failure

  SUBCASE("rerunning after the failure reuses the persisted prefix") {
    std::vector<probes::Probe> fixed = {make_probe("c0", "fine"),
                                        make_probe("c1", "fine"),
                                        make_probe("c3", "fine")};
    const auto out = score_batch(scorer, fixed, st);
    CHECK(out.size() == 3);
    CHECK(st.size() == 3);
  }
}

TEST_CASE("score_batch is mode independent") {
  ModeGuard guard;
  auto run = [](par::Mode mode) {
    par::set_mode(mode);
    TempDir dir(mode == par::Mode::serial ? "ser" : "par");
    store::ScoreStore st(dir.path);
    auto mock = make_hash_mock_scorer("mode-model", 7);
    std::vector<probes::Probe> batch;
    for (int i = 0; i < 40; ++i)
      batch.push_back(make_probe("ctx " + std::to_string(i), "w" + std::to_string(i % 5)));
    return score_batch(*mock, batch, st);
  };
  const auto serial = run(par::Mode::serial);
  const auto openmp = run(par::Mode::openmp);
  REQUIRE(serial.size() == openmp.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].log_prob == openmp[i].log_prob);
    CHECK(serial[i].cache_key == openmp[i].cache_key);
  }
}

TEST_CASE("native presets resolve and unknown ids do not") {
  auto s = make_native_scorer("tiny-ar-small");
  CHECK(s->descriptor().model_id == "tiny-ar-small");
  CHECK(s->descriptor().parameter_count > 0);
  CHECK(s->kind() == ScorerKind::autoregressive);
  CHECK_THROWS_AS(make_native_scorer("no-such-model"), BackendError);
}

TEST_CASE("native scorer is deterministic across instances") {
  auto a = make_native_scorer("tiny-ar-small");
  auto b = make_native_scorer("tiny-ar-small");
  const std::string ctx = "The person who is male is";
  for (const char* comp : {"a man", "a woman", "nonbinary"}) {
    const auto oa = a->score(ctx, comp);
    const auto ob = b->score(ctx, comp);
    CHECK(oa.log_prob == ob.log_prob);
    CHECK(oa.log_prob < 0.0);
    CHECK(std::isfinite(oa.log_prob));
    CHECK(oa.token_count == static_cast<long>(oa.token_log_probs.size()));
  }
}

TEST_CASE("autoregressive scoring obeys the chain rule") {
  auto s = make_native_scorer("tiny-ar-small");
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"The person who is male is", "a man"},
      {"The person who is female is", "a woman"},
      {"The person who has testosterone is", "a man"},
      {"The person who has a vagina is", "a woman"},
      {"The person who is transgender has", "panic disorder"},
      {"The person who is nonbinary has", "social anxiety"},
      {"The person who has XX chromosomes is", "a woman"},
      {"The person who has a penis is", "a man"},
      {"The person who is genderfluid has", "heart disease"},
      {"The person who is male is", "a nondisclosure"},
  };
  for (const auto& [ctx, comp] : pairs) {
    const auto space = comp.find(' ');
    REQUIRE(space != std::string::npos);
    const std::string head = comp.substr(0, space);
    const std::string tail = comp.substr(space + 1);
    const auto joint = s->score(ctx, comp);
    const auto first = s->score(ctx, head);
    const auto rest = s->score(ctx + " " + head, tail);
    CHECK(joint.log_prob ==
          doctest::Approx(first.log_prob + rest.log_prob).epsilon(1e-6));
    CHECK(joint.token_count == first.token_count + rest.token_count);
  }
}

TEST_CASE("masked scorer variants are distinct and finite") {
  auto single = make_native_scorer("tiny-masked-small", false);
  auto iter = make_native_scorer("tiny-masked-small", true);
  CHECK(single->kind() == ScorerKind::masked);
  CHECK(single->kind_label() == "masked");
  CHECK(iter->kind_label() == "masked:iterative");

  const std::string ctx = "The person who is female is";
  const auto a = single->score(ctx, "a woman");
  const auto b = iter->score(ctx, "a woman");
  CHECK(std::isfinite(a.log_prob));
  CHECK(std::isfinite(b.log_prob));
  CHECK(a.log_prob < 0.0);
  CHECK(b.log_prob < 0.0);
  CHECK(a.token_count == 2);
  CHECK(b.token_count == 2);

  // Same key inputs except the kind label, so the cache entries differ.
  CHECK(make_cache_key("m", "f", ctx, "a woman", single->kind_label()) !=
        make_cache_key("m", "f", ctx, "a woman", iter->kind_label()));
}

TEST_CASE("encoder-decoder scorer produces finite joint log-probs") {
  auto s = make_native_scorer("tiny-encdec-small");
  CHECK(s->kind() == ScorerKind::encoder_decoder);
  const auto out = s->score("The person who is male is", "a man");
  CHECK(std::isfinite(out.log_prob));
  CHECK(out.log_prob < 0.0);
  CHECK(out.token_count == 2);
  const auto again = s->score("The person who is male is", "a man");
  CHECK(out.log_prob == again.log_prob);
}

TEST_CASE("scorer kind names round-trip") {
  for (auto k : {ScorerKind::autoregressive, ScorerKind::masked,
                 ScorerKind::encoder_decoder, ScorerKind::mock, ScorerKind::remote})
    CHECK(scorer_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(scorer_kind_from_string("quantum"), ConfigError);
}

}  // TEST_SUITE
