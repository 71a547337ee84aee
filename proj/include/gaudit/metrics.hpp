#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaudit/lexicon.hpp"
#include "gaudit/scoring.hpp"

namespace gaudit::metrics {

enum class MetricKind { folk_subversive, sex_gender, gender_illness, baseline_median };

std::string_view to_string(MetricKind k);

struct Component {
  std::string context_key;
  std::string completion_key;
  double weight = 1.0;
  double log_prob = 0.0;
};

// A metric value plus everything needed to recompute it, so any reported
// number can be audited back to the score records that produced it.
struct MetricResult {
  MetricKind kind = MetricKind::folk_subversive;
  double value = 0.0;
  std::vector<Component> components;
  double divisor = 1.0;
  std::string model_id;
  std::map<std::string, std::string> parameters;

  // Re-derives value from the components; bit-identical to value.
  double recompute() const;
};

// Index over score records by (context_key, completion_key). Keeps pointers
// into the given vector, which must outlive the lookup.
class ScoreLookup {
 public:
  explicit ScoreLookup(const std::vector<scoring::ScoreRecord>& records);
  const scoring::ScoreRecord* find(const std::string& context_key,
                                   const std::string& completion_key) const;
  const scoring::ScoreRecord& require(const std::string& context_key,
                                      const std::string& completion_key) const;

 private:
  std::map<std::pair<std::string, std::string>, const scoring::ScoreRecord*> map_;
};

// (1/|G|) * sum over g, s of delta(g, s) * log P(g | Context(s)), where delta
// is +1 iff folk_alignment(g) equals polarity(s). identifier_subset restricts
// G (and its size) to the named gender identifiers; empty optional means all.
MetricResult folk_subversive_lpr(
    const std::vector<scoring::ScoreRecord>& scores, const lexicon::Lexicon& lex,
    const std::optional<std::vector<std::string>>& identifier_subset = std::nullopt);

// Sensitivity variant: mean of folk-aligned logs minus mean of non-aligned
// logs, so the two cell groups weigh equally. Never the default.
MetricResult folk_subversive_lpr_balanced(
    const std::vector<scoring::ScoreRecord>& scores, const lexicon::Lexicon& lex,
    const std::optional<std::vector<std::string>>& identifier_subset = std::nullopt);

// log P(g | Context(female s)) - log P(g | Context(male s')).
MetricResult sex_gender_lpr(const std::vector<scoring::ScoreRecord>& scores,
                            const lexicon::GenderIdentifier& g,
                            const lexicon::SexCharacteristic& female_s,
                            const lexicon::SexCharacteristic& male_s);

// log P(i | Context(g)) - log P(i | Context(male identifier)); g must not be
// the male identifier itself.
MetricResult gender_illness_lpr(const std::vector<scoring::ScoreRecord>& scores,
                                const lexicon::GenderIdentifier& g,
                                const lexicon::IllnessTerm& illness,
                                const lexicon::Lexicon& lex);

// Median log prob of the 47 baseline nouns for one sexed context.
MetricResult baseline_median(const std::vector<scoring::ScoreRecord>& scores,
                             const std::string& context_key);

}  // namespace gaudit::metrics
