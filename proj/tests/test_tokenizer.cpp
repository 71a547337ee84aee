#include <cctype>
#include <string>
#include <vector>

#include "doctest.h"
#include "gaudit/errors.hpp"
#include "gaudit/lexicon.hpp"
#include "gaudit/tokenizer.hpp"

using namespace gaudit;
using tok::Tokenizer;
using tok::builtin_tokenizer;

namespace {

std::string decode(const Tokenizer& t, const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) out += t.piece(id);
  return out;
}

}  // namespace

TEST_SUITE("tokenizer") {

TEST_CASE("encoding concatenates back to the input") {
  const auto& t = builtin_tokenizer();
  for (const char* text : {"The person who is male is",
                           "The person who has a vagina is",
                           " a man",
                           " two-spirit",
                           "arbitrary text with ~weird~ bytes \x01\x7f",
                           "schizophrenia",
                           ""}) {
    const auto ids = t.encode(text);
    CHECK(decode(t, ids) == text);
  }
}

TEST_CASE("composition across a space boundary") {
  const auto& t = builtin_tokenizer();
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"The person who is male is", "a man"},
      {"The person who is a woman has", "anxiety"},
      {"The person who has XX chromosomes is", "nonbinary"},
      {"hello", "world"},
  };
  for (const auto& [a, b] : pairs) {
    auto combined = t.encode(a + " " + b);
    auto left = t.encode(a);
    auto right = t.encode(" " + b);
    left.insert(left.end(), right.begin(), right.end());
    CHECK(combined == left);
  }
}

TEST_CASE("special ids are reserved and never produced by encode") {
  const auto& t = builtin_tokenizer();
  CHECK(t.bos_id() >= 0);
  CHECK(t.mask_id() >= 0);
  CHECK(t.bos_id() != t.mask_id());
  const auto ids = t.encode("<bos> <mask> <bos>");
  for (int id : ids) {
    CHECK(id != t.bos_id());
    CHECK(id != t.mask_id());
  }
  CHECK(decode(t, ids) == "<bos> <mask> <bos>");
}

TEST_CASE("fingerprint is stable and reflects the inventory") {
  const auto& t = builtin_tokenizer();
  CHECK(t.fingerprint().size() == 64);  // hex sha256
  CHECK(t.fingerprint() == builtin_tokenizer().fingerprint());

  std::vector<std::string> pieces;
  for (int b = 0; b < 256; ++b) pieces.push_back(std::string(1, static_cast<char>(b)));
  pieces.push_back("hello");
  pieces.push_back("<b>");
  pieces.push_back("<m>");
  Tokenizer small(pieces, 257, 258);
  auto pieces2 = pieces;
  pieces2[256] = "goodbye";
  Tokenizer small2(pieces2, 257, 258);
  CHECK(small.fingerprint() != small2.fingerprint());
  CHECK(small.fingerprint() != t.fingerprint());
  CHECK(Tokenizer(pieces, 257, 258).fingerprint() == small.fingerprint());
}

TEST_CASE("greedy match prefers the longest piece") {
  const auto& t = builtin_tokenizer();
  // "transgender" is in the vocabulary as one piece; greedy matching must not
  // split it into "trans" + bytes.
  const auto ids = t.encode(" transgender");
  REQUIRE(ids.size() == 1);
  CHECK(t.piece(ids[0]) == " transgender");
}

TEST_CASE("every lexicon surface form round-trips through whole-word pieces") {
  const auto& t = builtin_tokenizer();
  const auto lex =
      lexicon::load_lexicon_file(std::string(GAUDIT_DATA_DIR) + "/lexicon.json");

  auto check_term = [&](const std::string& term) {
    const std::string text = " " + term;
    const auto ids = t.encode(text);
    CHECK(decode(t, ids) == text);
    // Words stay whole; single-char pieces are punctuation (hyphens,
    // apostrophes) or the possessive "s" stem, never letter-by-letter
    // fallback.
    for (int id : ids) {
      const std::string& p = t.piece(id);
      if (p.size() == 1 && std::isalpha(static_cast<unsigned char>(p[0])))
        CHECK(p == "s");
    }
  };

  for (const auto& s : lex.sex_characteristics) check_term(s.term);
  for (const auto& g : lex.gender_identifiers) check_term(g.term);
  for (const auto& i : lex.illnesses) check_term(i.term);
  for (const auto& n : lex.baseline_nouns) check_term(n.term);
}

TEST_CASE("binary gender completions are two tokens") {
  const auto& t = builtin_tokenizer();
  CHECK(t.encode(" a man").size() == 2);
  CHECK(t.encode(" a woman").size() == 2);
}

TEST_CASE("byte fallback keeps unknown text encodable") {
  const auto& t = builtin_tokenizer();
  const std::string text = "zzqx\xc3\xa9!";
  const auto ids = t.encode(text);
  CHECK(decode(t, ids) == text);
}

}  // TEST_SUITE
