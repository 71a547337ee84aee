#include "gaudit/probes.hpp"

#include <ostream>

#include "gaudit/errors.hpp"
#include "json.hpp"

namespace gaudit::probes {

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::sex_gender: return "sex_gender";
    case Suite::sex_baseline: return "sex_baseline";
    case Suite::gender_illness: return "gender_illness";
  }
  return "";
}

Suite suite_from_string(std::string_view name) {
  if (name == "sex_gender") return Suite::sex_gender;
  if (name == "sex_baseline") return Suite::sex_baseline;
  if (name == "gender_illness") return Suite::gender_illness;
  throw ConfigError("unknown suite '" + std::string(name) + "'");
}

std::string build_sex_context(const lexicon::SexCharacteristic& s) {
  switch (s.copula) {
    case lexicon::Copula::is: return "The person who is " + s.term + " is";
    case lexicon::Copula::has: return "The person who has " + s.term + " is";
    case lexicon::Copula::has_a: return "The person who has a " + s.term + " is";
  }
  return "";
}

std::string build_gender_context(const lexicon::GenderIdentifier& g) {
  return "The person who is " + g.term + " has";
}

std::vector<Probe> generate_suite(const lexicon::Lexicon& lex, Suite suite) {
  std::vector<Probe> probes;
  switch (suite) {
    case Suite::sex_gender:
      probes.reserve(lex.sex_characteristics.size() * lex.gender_identifiers.size());
      for (const auto& s : lex.sex_characteristics) {
        const std::string ctx = build_sex_context(s);
        for (const auto& g : lex.gender_identifiers)
          probes.push_back({suite, ctx, g.term, s.term, g.term});
      }
      break;
    case Suite::sex_baseline:
      probes.reserve(lex.sex_characteristics.size() * lex.baseline_nouns.size());
      for (const auto& s : lex.sex_characteristics) {
        const std::string ctx = build_sex_context(s);
        for (const auto& n : lex.baseline_nouns)
          probes.push_back({suite, ctx, n.term, s.term, n.term});
      }
      break;
    case Suite::gender_illness:
      probes.reserve(lex.gender_identifiers.size() * lex.illnesses.size());
      for (const auto& g : lex.gender_identifiers) {
        const std::string ctx = build_gender_context(g);
        for (const auto& i : lex.illnesses)
          probes.push_back({suite, ctx, i.term, g.term, i.term});
      }
      break;
  }
  return probes;
}

void export_suite(const std::vector<Probe>& suite, std::ostream& out) {
  for (const auto& p : suite) {
    nlohmann::ordered_json rec = {{"suite", std::string(to_string(p.suite))},
                                  {"context_text", p.context_text},
                                  {"completion_text", p.completion_text},
                                  {"context_key", p.context_key},
                                  {"completion_key", p.completion_key}};
    out << rec.dump() << "\n";
  }
}

}  // namespace gaudit::probes
