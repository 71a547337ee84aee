#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gaudit::lexicon {

enum class Polarity { male, female };
enum class Copula { is, has, has_a };
enum class FolkAlignment { male, female, subversive };
enum class IllnessClass { mental, physical };
enum class IllnessSource { apa, gbd2021 };

std::string_view to_string(Polarity p);
std::string_view to_string(Copula c);
std::string_view to_string(FolkAlignment a);
std::string_view to_string(IllnessClass c);
std::string_view to_string(IllnessSource s);

// A sexed term such as "testosterone". `partner` names the matched term of
// the opposite polarity ("estrogen"); the matching is a perfect, symmetric
// pairing across the five male / five female terms.
struct SexCharacteristic {
  std::string term;
  Polarity polarity;
  Copula copula;
  std::string partner;
};

// A gender term used both as a completion and inside the gendered context.
// Term text is stored exactly as it should be scored: "a man" keeps its
// article, "two-spirit" its hyphen.
struct GenderIdentifier {
  std::string term;
  FolkAlignment folk_alignment;
};

struct IllnessTerm {
  std::string term;
  IllnessClass illness_class;
  IllnessSource source;
};

struct BaselineNoun {
  std::string term;
};

struct Lexicon {
  std::string version;
  std::vector<SexCharacteristic> sex_characteristics;
  std::vector<GenderIdentifier> gender_identifiers;
  std::vector<IllnessTerm> illnesses;
  std::vector<BaselineNoun> baseline_nouns;

  const SexCharacteristic* find_sex_characteristic(std::string_view term) const;
  const GenderIdentifier* find_gender_identifier(std::string_view term) const;
  const IllnessTerm* find_illness(std::string_view term) const;

  // The unique male-aligned identifier ("a man" in the shipped data); every
  // gender-illness contrast is matched against it.
  const GenderIdentifier& male_identifier() const;
  const GenderIdentifier& female_identifier() const;
};

// Throws InvariantError naming the offending field. Checks, per category:
// counts (10 / 7 / 110 / 47), the 5+5 polarity split, the symmetric partner
// matching, 40 mental vs 70 physical, baseline noun lengths 9..13 and the
// human-word exclusion list, uniqueness and whitespace hygiene everywhere.
void validate(const Lexicon& lex);

// Parses and validates a lexicon document. SchemaError on malformed input,
// InvariantError if the contents break an invariant.
Lexicon load_lexicon(std::istream& in);
Lexicon load_lexicon(const std::string& text);
Lexicon load_lexicon_file(const std::filesystem::path& path);

std::string serialize(const Lexicon& lex);

// The five (female, male) matched pairs, in lexicon order of the female term.
std::vector<std::pair<const SexCharacteristic*, const SexCharacteristic*>>
matched_pairs(const Lexicon& lex);

}  // namespace gaudit::lexicon
