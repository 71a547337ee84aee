#include "gaudit/metrics.hpp"

#include <algorithm>

#include "gaudit/errors.hpp"

namespace gaudit::metrics {

std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::folk_subversive: return "folk_subversive";
    case MetricKind::sex_gender: return "sex_gender";
    case MetricKind::gender_illness: return "gender_illness";
    case MetricKind::baseline_median: return "baseline_median";
  }
  return "";
}

double MetricResult::recompute() const {
  if (kind == MetricKind::baseline_median) {
    std::vector<double> logs;
    logs.reserve(components.size());
    for (const auto& c : components) logs.push_back(c.log_prob);
    std::sort(logs.begin(), logs.end());
    return logs[(logs.size() - 1) / 2];
  }
  double sum = 0.0;
  for (const auto& c : components) sum += c.weight * c.log_prob;
  return sum / divisor;
}

ScoreLookup::ScoreLookup(const std::vector<scoring::ScoreRecord>& records) {
  for (const auto& r : records)
    map_.emplace(std::make_pair(r.probe.context_key, r.probe.completion_key), &r);
}

const scoring::ScoreRecord* ScoreLookup::find(const std::string& context_key,
                                              const std::string& completion_key) const {
  auto it = map_.find({context_key, completion_key});
  return it == map_.end() ? nullptr : it->second;
}

const scoring::ScoreRecord& ScoreLookup::require(
    const std::string& context_key, const std::string& completion_key) const {
  const scoring::ScoreRecord* r = find(context_key, completion_key);
  if (!r)
    throw MissingScoreError("no score on file for (" + context_key + ", " +
                            completion_key + ")");
  return *r;
}

namespace {

std::vector<const lexicon::GenderIdentifier*> resolve_identifiers(
    const lexicon::Lexicon& lex,
    const std::optional<std::vector<std::string>>& subset) {
  std::vector<const lexicon::GenderIdentifier*> out;
  if (!subset) {
    for (const auto& g : lex.gender_identifiers) out.push_back(&g);
    return out;
  }
  if (subset->empty())
    throw DomainError("folk_subversive_lpr: identifier subset is empty");
  for (const auto& term : *subset) {
    const lexicon::GenderIdentifier* g = lex.find_gender_identifier(term);
    if (!g)
      throw DomainError("folk_subversive_lpr: unknown gender identifier '" + term + "'");
    out.push_back(g);
  }
  return out;
}

bool folk_aligned(const lexicon::GenderIdentifier& g, const lexicon::SexCharacteristic& s) {
  return (g.folk_alignment == lexicon::FolkAlignment::male &&
          s.polarity == lexicon::Polarity::male) ||
         (g.folk_alignment == lexicon::FolkAlignment::female &&
          s.polarity == lexicon::Polarity::female);
}

std::string model_of(const std::vector<scoring::ScoreRecord>& scores) {
  return scores.empty() ? std::string() : scores.front().model_id;
}

}  // namespace

MetricResult folk_subversive_lpr(
    const std::vector<scoring::ScoreRecord>& scores, const lexicon::Lexicon& lex,
    const std::optional<std::vector<std::string>>& identifier_subset) {
  const auto identifiers = resolve_identifiers(lex, identifier_subset);
  const ScoreLookup lookup(scores);

  MetricResult res;
  res.kind = MetricKind::folk_subversive;
  res.model_id = model_of(scores);
  res.divisor = static_cast<double>(identifiers.size());
  res.parameters["identifier_count"] = std::to_string(identifiers.size());
  for (const auto* g : identifiers)
    for (const auto& s : lex.sex_characteristics) {
      const double delta = folk_aligned(*g, s) ? 1.0 : -1.0;
      const auto& rec = lookup.require(s.term, g->term);
      res.components.push_back({s.term, g->term, delta, rec.log_prob});
    }
  res.value = res.recompute();
  return res;
}

MetricResult folk_subversive_lpr_balanced(
    const std::vector<scoring::ScoreRecord>& scores, const lexicon::Lexicon& lex,
    const std::optional<std::vector<std::string>>& identifier_subset) {
  const auto identifiers = resolve_identifiers(lex, identifier_subset);
  const ScoreLookup lookup(scores);

  std::size_t n_folk = 0, n_other = 0;
  for (const auto* g : identifiers)
    for (const auto& s : lex.sex_characteristics)
      (folk_aligned(*g, s) ? n_folk : n_other)++;
  if (n_folk == 0 || n_other == 0)
    throw DomainError(
        "folk_subversive_lpr_balanced: identifier subset leaves one side empty");

  MetricResult res;
  res.kind = MetricKind::folk_subversive;
  res.model_id = model_of(scores);
  res.parameters["variant"] = "balanced";
  res.parameters["identifier_count"] = std::to_string(identifiers.size());
  for (const auto* g : identifiers)
    for (const auto& s : lex.sex_characteristics) {
      const bool folk = folk_aligned(*g, s);
      const double weight = folk ? 1.0 / static_cast<double>(n_folk)
                                 : -1.0 / static_cast<double>(n_other);
      const auto& rec = lookup.require(s.term, g->term);
      res.components.push_back({s.term, g->term, weight, rec.log_prob});
    }
  res.value = res.recompute();
  return res;
}

MetricResult sex_gender_lpr(const std::vector<scoring::ScoreRecord>& scores,
                            const lexicon::GenderIdentifier& g,
                            const lexicon::SexCharacteristic& female_s,
                            const lexicon::SexCharacteristic& male_s) {
  if (female_s.polarity != lexicon::Polarity::female)
    throw DomainError("sex_gender_lpr: '" + female_s.term + "' is not female-polarity");
  if (male_s.polarity != lexicon::Polarity::male)
    throw DomainError("sex_gender_lpr: '" + male_s.term + "' is not male-polarity");

  const ScoreLookup lookup(scores);
  const auto& female_rec = lookup.require(female_s.term, g.term);
  const auto& male_rec = lookup.require(male_s.term, g.term);

  MetricResult res;
  res.kind = MetricKind::sex_gender;
  res.model_id = model_of(scores);
  res.parameters["gender"] = g.term;
  res.parameters["female"] = female_s.term;
  res.parameters["male"] = male_s.term;
  res.components.push_back({female_s.term, g.term, 1.0, female_rec.log_prob});
  res.components.push_back({male_s.term, g.term, -1.0, male_rec.log_prob});
  res.value = res.recompute();
  return res;
}

MetricResult gender_illness_lpr(const std::vector<scoring::ScoreRecord>& scores,
                                const lexicon::GenderIdentifier& g,
                                const lexicon::IllnessTerm& illness,
                                const lexicon::Lexicon& lex) {
  const lexicon::GenderIdentifier& male = lex.male_identifier();
  if (g.term == male.term)
    throw DomainError("gender_illness_lpr: '" + g.term +
                      "' cannot be contrasted with itself");

  const ScoreLookup lookup(scores);
  const auto& g_rec = lookup.require(g.term, illness.term);
  const auto& male_rec = lookup.require(male.term, illness.term);

  MetricResult res;
  res.kind = MetricKind::gender_illness;
  res.model_id = model_of(scores);
  res.parameters["gender"] = g.term;
  res.parameters["illness"] = illness.term;
  res.parameters["matched"] = male.term;
  res.components.push_back({g.term, illness.term, 1.0, g_rec.log_prob});
  res.components.push_back({male.term, illness.term, -1.0, male_rec.log_prob});
  res.value = res.recompute();
  return res;
}

MetricResult baseline_median(const std::vector<scoring::ScoreRecord>& scores,
                             const std::string& context_key) {
  MetricResult res;
  res.kind = MetricKind::baseline_median;
  res.parameters["context"] = context_key;
  for (const auto& r : scores) {
    if (r.probe.context_key != context_key) continue;
    res.components.push_back({r.probe.context_key, r.probe.completion_key, 1.0,
                              r.log_prob});
    if (res.model_id.empty()) res.model_id = r.model_id;
  }
  if (res.components.size() != 47)
    throw MissingScoreError("baseline_median: context '" + context_key + "' has " +
                            std::to_string(res.components.size()) +
                            " baseline records, expected 47");
  res.value = res.recompute();
  return res;
}

}  // namespace gaudit::metrics
