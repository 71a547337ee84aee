#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gaudit/lexicon.hpp"

namespace gaudit::probes {

enum class Suite { sex_gender, sex_baseline, gender_illness };

std::string_view to_string(Suite s);
Suite suite_from_string(std::string_view name);

struct Probe {
  Suite suite;
  std::string context_text;     // ends with "is" or "has", no trailing space
  std::string completion_text;  // the word of interest, no surrounding whitespace
  std::string context_key;      // the s or g term inside the context
  std::string completion_key;   // the g, noun, or i being predicted
};

// "The person who is male is" / "The person who has testosterone is" /
// "The person who has a penis is", depending on the copula.
std::string build_sex_context(const lexicon::SexCharacteristic& s);

// "The person who is {g} has"
std::string build_gender_context(const lexicon::GenderIdentifier& g);

// Cross product in lexicon order, context-major. Sizes with the shipped
// lexicon: sex_gender 70, sex_baseline 470, gender_illness 770.
std::vector<Probe> generate_suite(const lexicon::Lexicon& lex, Suite suite);

// Line-delimited JSON records for external scoring.
void export_suite(const std::vector<Probe>& suite, std::ostream& out);

}  // namespace gaudit::probes
