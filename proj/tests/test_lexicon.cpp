#include <set>

#include "doctest.h"
#include "gaudit/errors.hpp"
#include "gaudit/lexicon.hpp"

using namespace gaudit;
using namespace gaudit::lexicon;

namespace {

Lexicon shipped() {
  return load_lexicon_file(std::string(GAUDIT_DATA_DIR) + "/lexicon.json");
}

}  // namespace

TEST_SUITE("lexicon") {

TEST_CASE("shipped lexicon passes validation with the expected counts") {
  const Lexicon lex = shipped();
  CHECK(lex.version == "1");
  CHECK(lex.sex_characteristics.size() == 10);
  CHECK(lex.gender_identifiers.size() == 7);
  CHECK(lex.illnesses.size() == 110);
  CHECK(lex.baseline_nouns.size() == 47);

  size_t male = 0, female = 0;
  for (const auto& s : lex.sex_characteristics)
    (s.polarity == Polarity::male ? male : female)++;
  CHECK(male == 5);
  CHECK(female == 5);

  size_t mental = 0, physical = 0;
  for (const auto& i : lex.illnesses) {
    if (i.illness_class == IllnessClass::mental) {
      ++mental;
      CHECK(i.source == IllnessSource::apa);
    } else {
      ++physical;
      CHECK(i.source == IllnessSource::gbd2021);
    }
  }
  CHECK(mental == 40);
  CHECK(physical == 70);
}

TEST_CASE("shipped gender identifiers carry the expected terms and alignments") {
  const Lexicon lex = shipped();
  REQUIRE(lex.gender_identifiers.size() == 7);
  CHECK(lex.male_identifier().term == "a man");
  CHECK(lex.female_identifier().term == "a woman");
  const std::set<std::string> subversive = {"transgender", "nonbinary", "genderqueer",
                                            "genderfluid", "two-spirit"};
  std::set<std::string> seen;
  for (const auto& g : lex.gender_identifiers)
    if (g.folk_alignment == FolkAlignment::subversive) seen.insert(g.term);
  CHECK(seen == subversive);
}

TEST_CASE("partner matching is a symmetric involution across polarities") {
  const Lexicon lex = shipped();
  for (const auto& s : lex.sex_characteristics) {
    const SexCharacteristic* p = lex.find_sex_characteristic(s.partner);
    REQUIRE(p != nullptr);
    CHECK(p->partner == s.term);
    CHECK(p->polarity != s.polarity);
  }
}

TEST_CASE("matched pairs come out in lexicon order of the female term") {
  const Lexicon lex = shipped();
  const auto pairs = matched_pairs(lex);
  REQUIRE(pairs.size() == 5);
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"female", "male"},
      {"vagina", "penis"},
      {"uterus", "prostate"},
      {"estrogen", "testosterone"},
      {"XX chromosomes", "XY chromosomes"}};
  for (size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].first->term == expected[i].first);
    CHECK(pairs[i].second->term == expected[i].second);
  }
}

TEST_CASE("copula assignment follows the shipped data") {
  const Lexicon lex = shipped();
  auto copula_of = [&](const char* term) {
    return lex.find_sex_characteristic(term)->copula;
  };
  CHECK(copula_of("male") == Copula::is);
  CHECK(copula_of("female") == Copula::is);
  for (const char* t : {"testosterone", "estrogen", "XY chromosomes", "XX chromosomes"})
    CHECK(copula_of(t) == Copula::has);
  for (const char* t : {"penis", "prostate", "vagina", "uterus"})
    CHECK(copula_of(t) == Copula::has_a);
}

TEST_CASE("baseline nouns are 9 to 13 characters and exclude human words") {
  const Lexicon lex = shipped();
  for (const auto& n : lex.baseline_nouns) {
    CHECK(n.term.size() >= 9);
    CHECK(n.term.size() <= 13);
    CHECK(n.term != "bartender");
    CHECK(n.term != "instructor");
    CHECK(n.term != "creationist");
  }
}

TEST_CASE("serialize and reload round-trips every field") {
  const Lexicon lex = shipped();
  const Lexicon again = load_lexicon(serialize(lex));
  CHECK(again.version == lex.version);
  REQUIRE(again.sex_characteristics.size() == lex.sex_characteristics.size());
  for (size_t i = 0; i < lex.sex_characteristics.size(); ++i) {
    CHECK(again.sex_characteristics[i].term == lex.sex_characteristics[i].term);
    CHECK(again.sex_characteristics[i].polarity == lex.sex_characteristics[i].polarity);
    CHECK(again.sex_characteristics[i].copula == lex.sex_characteristics[i].copula);
    CHECK(again.sex_characteristics[i].partner == lex.sex_characteristics[i].partner);
  }
  REQUIRE(again.gender_identifiers.size() == lex.gender_identifiers.size());
  for (size_t i = 0; i < lex.gender_identifiers.size(); ++i) {
    CHECK(again.gender_identifiers[i].term == lex.gender_identifiers[i].term);
    CHECK(again.gender_identifiers[i].folk_alignment ==
          lex.gender_identifiers[i].folk_alignment);
  }
  REQUIRE(again.illnesses.size() == lex.illnesses.size());
  for (size_t i = 0; i < lex.illnesses.size(); ++i) {
    CHECK(again.illnesses[i].term == lex.illnesses[i].term);
    CHECK(again.illnesses[i].illness_class == lex.illnesses[i].illness_class);
    CHECK(again.illnesses[i].source == lex.illnesses[i].source);
  }
  REQUIRE(again.baseline_nouns.size() == lex.baseline_nouns.size());
  for (size_t i = 0; i < lex.baseline_nouns.size(); ++i)
    CHECK(again.baseline_nouns[i].term == lex.baseline_nouns[i].term);
}

TEST_CASE("dropping a mental illness reports the count that went wrong") {
  Lexicon lex = shipped();
  for (auto it = lex.illnesses.begin(); it != lex.illnesses.end(); ++it) {
    if (it->illness_class == IllnessClass::mental) {
      lex.illnesses.erase(it);
      break;
    }
  }
  CHECK_THROWS_WITH_AS(validate(lex), doctest::Contains("mental illness count 39"),
                       InvariantError);
}

TEST_CASE("category count violations raise InvariantError") {
  SUBCASE("sex characteristic removed") {
    Lexicon lex = shipped();
    lex.sex_characteristics.pop_back();
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("gender identifier removed") {
    Lexicon lex = shipped();
    lex.gender_identifiers.pop_back();
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("baseline noun removed") {
    Lexicon lex = shipped();
    lex.baseline_nouns.pop_back();
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("second male-aligned identifier") {
    Lexicon lex = shipped();
    for (auto& g : lex.gender_identifiers)
      if (g.folk_alignment == FolkAlignment::female)
        g.folk_alignment = FolkAlignment::male;
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
}

TEST_CASE("broken partner relations raise InvariantError") {
  SUBCASE("asymmetric matching") {
    Lexicon lex = shipped();
    lex.find_sex_characteristic("male");
    lex.sex_characteristics[0].partner = "vagina";  // vagina points at penis
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("unknown partner") {
    Lexicon lex = shipped();
    lex.sex_characteristics[0].partner = "no such term";
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("same-polarity partner") {
    Lexicon lex = shipped();
    // male <-> penis are both male-polarity
    lex.sex_characteristics[0].partner = "penis";
    lex.sex_characteristics[1].partner = "male";
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
}

TEST_CASE("term hygiene violations raise InvariantError") {
  SUBCASE("duplicate term") {
    Lexicon lex = shipped();
    lex.baseline_nouns[1] = lex.baseline_nouns[0];
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("outer whitespace") {
    Lexicon lex = shipped();
    lex.illnesses[0].term += " ";
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("baseline noun too short") {
    Lexicon lex = shipped();
    lex.baseline_nouns[0].term = "short";
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
  SUBCASE("excluded baseline noun") {
    Lexicon lex = shipped();
    lex.baseline_nouns[0].term = "creationist";
    CHECK_THROWS_AS(validate(lex), InvariantError);
  }
}

TEST_CASE("malformed documents raise SchemaError") {
  CHECK_THROWS_AS(load_lexicon("not json at all"), SchemaError);
  CHECK_THROWS_AS(load_lexicon("[]"), SchemaError);
  CHECK_THROWS_AS(load_lexicon(R"({"version": "1"})"), SchemaError);
  CHECK_THROWS_AS(
      load_lexicon(
          R"({"version":"1","sex_characteristics":[{"term":"x","polarity":"neither","copula":"is","partner":"y"}],"gender_identifiers":[],"illnesses":[],"baseline_nouns":[]})"),
      SchemaError);
  CHECK_THROWS_AS(load_lexicon_file("/nonexistent/lexicon.json"), StorageError);
}

}  // TEST_SUITE
