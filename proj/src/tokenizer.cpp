#include "gaudit/tokenizer.hpp"

#include <sstream>

#include "gaudit/errors.hpp"
#include "gaudit/util.hpp"

namespace gaudit::tok {

Tokenizer::Tokenizer(std::vector<std::string> pieces, int bos_id, int mask_id)
    : pieces_(std::move(pieces)), bos_id_(bos_id), mask_id_(mask_id) {
  for (size_t i = 0; i < pieces_.size(); ++i) {
    if (static_cast<int>(i) == bos_id_ || static_cast<int>(i) == mask_id_) continue;
    lookup_.emplace(pieces_[i], static_cast<int>(i));
    max_piece_len_ = std::max(max_piece_len_, pieces_[i].size());
  }
  std::string inventory = "tok1";
  for (const auto& p : pieces_) {
    inventory += '|';
    inventory += std::to_string(p.size());
    inventory += ':';
    inventory += p;
  }
  fingerprint_ = util::sha256_hex(inventory);
}

std::vector<int> Tokenizer::encode(std::string_view text) const {
  std::vector<int> ids;
  size_t pos = 0;
  std::string probe;
  while (pos < text.size()) {
    size_t best_len = 0;
    int best_id = -1;
    const size_t cap = std::min(max_piece_len_, text.size() - pos);
    for (size_t len = cap; len >= 1; --len) {
      probe.assign(text.substr(pos, len));
      auto it = lookup_.find(probe);
      if (it != lookup_.end()) {
        best_len = len;
        best_id = it->second;
        break;
      }
    }
    if (best_id < 0)  // unreachable with the byte fallback present
      throw TokenizationError("tokenizer: no piece matches at byte offset " +
                              std::to_string(pos));
    ids.push_back(best_id);
    pos += best_len;
  }
  return ids;
}

namespace {

// Word stems covering the probe templates and the shipped lexicon. Each stem
// yields a bare piece and a space-prefixed piece; anything else (hyphens,
// apostrophes, unknown words) falls back to byte pieces.
constexpr const char* kStems = R"(
The the person who is has a an
man woman transgender nonbinary genderqueer genderfluid two spirit
gender queer fluid trans non binary bi nary s
male female penis prostate testosterone estrogen vagina uterus
XX XY chromosomes
depression bipolar dysthymia seasonal affective disorder anxiety panic
social post traumatic stress acute obsessive compulsive body dysmorphia
hoarding trichotillomania excoriation self harm schizophrenia delusional
anorexia nervosa bulimia binge eating borderline personality antisocial
narcissistic histrionic avoidant adhd autism learning disability delirium
somatic symptom dissociative identity amnesia depersonalization insomnia
narcolepsy kleptomania pyromania intermittent explosive behavioral
intellectual
cancer intestinal appendicitis malnutrition injuries bedsores fever malaria
coronavirus stroke zika arthritis heart disease pancreatitis ebola epilepsy
parkinson lung chickenpox measles sarcomas hypertension infections
neuroblastoma rabies diabetes alcoholism diphtheria brain inflammation
meningitis ear infection cold pneumonia diarrhea hiv aids tuberculosis
hepatitis asthma kidney poisoning lymphoma hodgkin melanoma fungal
osteoarthritis dracunculiasis hansen headaches skin acne hair loss itchy
hives viral scabies back pain gout parasitic worm tapeworm bilharzia high
blood pressure neck oral diseases parasites hearing iron deficiency
blindness aneurysm eye
dumbwaiter outrigger turnstile marketing moonlight afterlife deduction
stonework accordion nondisclosure cultivator milestone testament complement
windscreen courthouse watercress aftershock transparency overheard preserves
appetiser mezzanine apartment grasshopper autoimmunity rediscovery
chemotaxis watermelon encounter barometer assignment vibrissae chainstay
examination shortwave inglenook valentine spirituality restriction pepperoni
convertible contribution condition subexpression cantaloupe pollution
)";

Tokenizer build_builtin() {
  std::vector<std::string> pieces;
  std::unordered_map<std::string, int> seen;
  auto add = [&](std::string p) {
    if (seen.emplace(p, static_cast<int>(pieces.size())).second)
      pieces.push_back(std::move(p));
  };
  for (int b = 0; b < 256; ++b) add(std::string(1, static_cast<char>(b)));
  std::istringstream words(kStems);
  std::string w;
  while (words >> w) {
    add(" " + w);
    add(w);
  }
  const int bos = static_cast<int>(pieces.size());
  pieces.push_back("<bos>");
  const int mask = static_cast<int>(pieces.size());
  pieces.push_back("<mask>");
  return Tokenizer(std::move(pieces), bos, mask);
}

}  // namespace

const Tokenizer& builtin_tokenizer() {
  static const Tokenizer instance = build_builtin();
  return instance;
}

}  // namespace gaudit::tok
