#include "gaudit/lexicon.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gaudit/errors.hpp"
#include "gaudit/util.hpp"
#include "json.hpp"

namespace gaudit::lexicon {

using nlohmann::json;

std::string_view to_string(Polarity p) {
  return p == Polarity::male ? "male" : "female";
}

std::string_view to_string(Copula c) {
  switch (c) {
    case Copula::is: return "is";
    case Copula::has: return "has";
    case Copula::has_a: return "has_a";
  }
  return "";
}

std::string_view to_string(FolkAlignment a) {
  switch (a) {
    case FolkAlignment::male: return "male";
    case FolkAlignment::female: return "female";
    case FolkAlignment::subversive: return "subversive";
  }
  return "";
}

std::string_view to_string(IllnessClass c) {
  return c == IllnessClass::mental ? "mental" : "physical";
}

std::string_view to_string(IllnessSource s) {
  return s == IllnessSource::apa ? "APA" : "GBD2021";
}

namespace {

Polarity polarity_from(const std::string& s, const std::string& where) {
  if (s == "male") return Polarity::male;
  if (s == "female") return Polarity::female;
  throw SchemaError("lexicon: " + where + ": unknown polarity '" + s + "'");
}

Copula copula_from(const std::string& s, const std::string& where) {
  if (s == "is") return Copula::is;
  if (s == "has") return Copula::has;
  if (s == "has_a") return Copula::has_a;
  throw SchemaError("lexicon: " + where + ": unknown copula '" + s + "'");
}

FolkAlignment alignment_from(const std::string& s, const std::string& where) {
  if (s == "male") return FolkAlignment::male;
  if (s == "female") return FolkAlignment::female;
  if (s == "subversive") return FolkAlignment::subversive;
  throw SchemaError("lexicon: " + where + ": unknown folk_alignment '" + s + "'");
}

IllnessClass illness_class_from(const std::string& s, const std::string& where) {
  if (s == "mental") return IllnessClass::mental;
  if (s == "physical") return IllnessClass::physical;
  throw SchemaError("lexicon: " + where + ": unknown class '" + s + "'");
}

IllnessSource source_from(const std::string& s, const std::string& where) {
  if (s == "APA") return IllnessSource::apa;
  if (s == "GBD2021") return IllnessSource::gbd2021;
  throw SchemaError("lexicon: " + where + ": unknown source '" + s + "'");
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError("lexicon: " + where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string())
    throw SchemaError("lexicon: " + where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

void check_terms(const std::vector<std::string>& terms, const char* category) {
  std::set<std::string> seen;
  for (const auto& t : terms) {
    if (t.empty())
      throw InvariantError(std::string("lexicon: ") + category + ": empty term");
    if (util::has_outer_whitespace(t))
      throw InvariantError(std::string("lexicon: ") + category + ": term '" + t +
                           "' has leading/trailing whitespace");
    if (!seen.insert(t).second)
      throw InvariantError(std::string("lexicon: ") + category + ": duplicate term '" +
                           t + "'");
  }
}

}  // namespace

const SexCharacteristic* Lexicon::find_sex_characteristic(std::string_view term) const {
  for (const auto& s : sex_characteristics)
    if (s.term == term) return &s;
  return nullptr;
}

const GenderIdentifier* Lexicon::find_gender_identifier(std::string_view term) const {
  for (const auto& g : gender_identifiers)
    if (g.term == term) return &g;
  return nullptr;
}

const IllnessTerm* Lexicon::find_illness(std::string_view term) const {
  for (const auto& i : illnesses)
    if (i.term == term) return &i;
  return nullptr;
}

const GenderIdentifier& Lexicon::male_identifier() const {
  for (const auto& g : gender_identifiers)
    if (g.folk_alignment == FolkAlignment::male) return g;
  throw InvariantError("lexicon: gender_identifiers: no male-aligned identifier");
}

const GenderIdentifier& Lexicon::female_identifier() const {
  for (const auto& g : gender_identifiers)
    if (g.folk_alignment == FolkAlignment::female) return g;
  throw InvariantError("lexicon: gender_identifiers: no female-aligned identifier");
}

void validate(const Lexicon& lex) {
  // sex characteristics: 10 terms, 5 per polarity, symmetric perfect matching
  {
    std::vector<std::string> terms;
    for (const auto& s : lex.sex_characteristics) terms.push_back(s.term);
    check_terms(terms, "sex_characteristics");

    if (lex.sex_characteristics.size() != 10)
      throw InvariantError("lexicon: sex_characteristics: count " +
                           std::to_string(lex.sex_characteristics.size()) + " != 10");
    size_t male = 0, female = 0;
    for (const auto& s : lex.sex_characteristics)
      (s.polarity == Polarity::male ? male : female)++;
    if (male != 5 || female != 5)
      throw InvariantError("lexicon: sex_characteristics: polarity split " +
                           std::to_string(male) + "/" + std::to_string(female) +
                           " != 5/5");
    for (const auto& s : lex.sex_characteristics) {
      const SexCharacteristic* p = lex.find_sex_characteristic(s.partner);
      if (!p)
        throw InvariantError("lexicon: sex_characteristics: '" + s.term +
                             "' names unknown partner '" + s.partner + "'");
      if (p->polarity == s.polarity)
        throw InvariantError("lexicon: sex_characteristics: '" + s.term +
                             "' and partner '" + p->term + "' share polarity " +
                             std::string(to_string(s.polarity)));
      if (p->partner != s.term)
        throw InvariantError("lexicon: sex_characteristics: matching not symmetric: '" +
                             s.term + "' -> '" + p->term + "' -> '" + p->partner + "'");
    }
  }

  // gender identifiers: 7 terms, exactly one male- and one female-aligned
  {
    std::vector<std::string> terms;
    for (const auto& g : lex.gender_identifiers) terms.push_back(g.term);
    check_terms(terms, "gender_identifiers");

    if (lex.gender_identifiers.size() != 7)
      throw InvariantError("lexicon: gender_identifiers: count " +
                           std::to_string(lex.gender_identifiers.size()) + " != 7");
    size_t male = 0, female = 0, subversive = 0;
    for (const auto& g : lex.gender_identifiers) {
      switch (g.folk_alignment) {
        case FolkAlignment::male: ++male; break;
        case FolkAlignment::female: ++female; break;
        case FolkAlignment::subversive: ++subversive; break;
      }
    }
    if (male != 1 || female != 1 || subversive != 5)
      throw InvariantError(
          "lexicon: gender_identifiers: alignment split male/female/subversive " +
          std::to_string(male) + "/" + std::to_string(female) + "/" +
          std::to_string(subversive) + " != 1/1/5");
  }

  // illnesses: 110 terms, 40 mental + 70 physical
  {
    std::vector<std::string> terms;
    for (const auto& i : lex.illnesses) terms.push_back(i.term);
    check_terms(terms, "illnesses");

    size_t mental = 0, physical = 0;
    for (const auto& i : lex.illnesses)
      (i.illness_class == IllnessClass::mental ? mental : physical)++;
    if (mental != 40)
      throw InvariantError("lexicon: illnesses: mental illness count " +
                           std::to_string(mental) + " != 40");
    if (physical != 70)
      throw InvariantError("lexicon: illnesses: physical illness count " +
                           std::to_string(physical) + " != 70");
    if (lex.illnesses.size() != 110)
      throw InvariantError("lexicon: illnesses: count " +
                           std::to_string(lex.illnesses.size()) + " != 110");
  }

  // baseline nouns: 47 terms, 9..13 chars, no human-related words
  {
    std::vector<std::string> terms;
    for (const auto& n : lex.baseline_nouns) terms.push_back(n.term);
    check_terms(terms, "baseline_nouns");

    if (lex.baseline_nouns.size() != 47)
      throw InvariantError("lexicon: baseline_nouns: count " +
                           std::to_string(lex.baseline_nouns.size()) + " != 47");
    static const std::set<std::string> excluded = {"bartender", "instructor",
                                                   "creationist"};
    for (const auto& n : lex.baseline_nouns) {
      if (n.term.size() < 9 || n.term.size() > 13)
        throw InvariantError("lexicon: baseline_nouns: '" + n.term + "' length " +
                             std::to_string(n.term.size()) + " outside 9..13");
      if (excluded.count(n.term))
        throw InvariantError("lexicon: baseline_nouns: '" + n.term +
                             "' is on the exclusion list");
    }
  }

  if (lex.version.empty())
    throw InvariantError("lexicon: version: empty");
}

Lexicon load_lexicon(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("lexicon: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("lexicon: top level must be an object");

  Lexicon lex;
  lex.version = require_string(doc, "version", "top level");

  const json& sex = require(doc, "sex_characteristics", "top level");
  if (!sex.is_array())
    throw SchemaError("lexicon: sex_characteristics must be an array");
  for (const auto& e : sex) {
    SexCharacteristic s;
    s.term = require_string(e, "term", "sex_characteristics");
    s.polarity = polarity_from(require_string(e, "polarity", s.term), s.term);
    s.copula = copula_from(require_string(e, "copula", s.term), s.term);
    s.partner = require_string(e, "partner", s.term);
    lex.sex_characteristics.push_back(std::move(s));
  }

  const json& gender = require(doc, "gender_identifiers", "top level");
  if (!gender.is_array())
    throw SchemaError("lexicon: gender_identifiers must be an array");
  for (const auto& e : gender) {
    GenderIdentifier g;
    g.term = require_string(e, "term", "gender_identifiers");
    g.folk_alignment = alignment_from(require_string(e, "folk_alignment", g.term), g.term);
    lex.gender_identifiers.push_back(std::move(g));
  }

  const json& ill = require(doc, "illnesses", "top level");
  if (!ill.is_array()) throw SchemaError("lexicon: illnesses must be an array");
  for (const auto& e : ill) {
    IllnessTerm i;
    i.term = require_string(e, "term", "illnesses");
    i.illness_class = illness_class_from(require_string(e, "class", i.term), i.term);
    i.source = source_from(require_string(e, "source", i.term), i.term);
    lex.illnesses.push_back(std::move(i));
  }

  const json& nouns = require(doc, "baseline_nouns", "top level");
  if (!nouns.is_array()) throw SchemaError("lexicon: baseline_nouns must be an array");
  for (const auto& e : nouns) {
    if (!e.is_string())
      throw SchemaError("lexicon: baseline_nouns entries must be strings");
    lex.baseline_nouns.push_back({e.get<std::string>()});
  }

  validate(lex);
  return lex;
}

Lexicon load_lexicon(const std::string& text) {
  std::istringstream in(text);
  return load_lexicon(in);
}

Lexicon load_lexicon_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageError("lexicon: cannot open '" + path.string() + "'");
  return load_lexicon(in);
}

std::string serialize(const Lexicon& lex) {
  json doc;
  doc["version"] = lex.version;
  json sex = json::array();
  for (const auto& s : lex.sex_characteristics)
    sex.push_back({{"term", s.term},
                   {"polarity", std::string(to_string(s.polarity))},
                   {"copula", std::string(to_string(s.copula))},
                   {"partner", s.partner}});
  doc["sex_characteristics"] = std::move(sex);
  json gender = json::array();
  for (const auto& g : lex.gender_identifiers)
    gender.push_back({{"term", g.term},
                      {"folk_alignment", std::string(to_string(g.folk_alignment))}});
  doc["gender_identifiers"] = std::move(gender);
  json ill = json::array();
  for (const auto& i : lex.illnesses)
    ill.push_back({{"term", i.term},
                   {"class", std::string(to_string(i.illness_class))},
                   {"source", std::string(to_string(i.source))}});
  doc["illnesses"] = std::move(ill);
  json nouns = json::array();
  for (const auto& n : lex.baseline_nouns) nouns.push_back(n.term);
  doc["baseline_nouns"] = std::move(nouns);
  return doc.dump(2) + "\n";
}

std::vector<std::pair<const SexCharacteristic*, const SexCharacteristic*>>
matched_pairs(const Lexicon& lex) {
  std::vector<std::pair<const SexCharacteristic*, const SexCharacteristic*>> pairs;
  for (const auto& s : lex.sex_characteristics) {
    if (s.polarity != Polarity::female) continue;
    const SexCharacteristic* partner = lex.find_sex_characteristic(s.partner);
    pairs.emplace_back(&s, partner);
  }
  return pairs;
}

}  // namespace gaudit::lexicon
