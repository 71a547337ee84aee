#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gaudit::tok {

// Greedy longest-match subword tokenizer. Pieces are either single bytes
// (ids 0..255, the fallback that makes every string encodable) or words with
// an optional single leading space. No piece contains an interior space, so
// token boundaries always fall at word boundaries and
// encode(a + " " + b) == encode(a) ++ encode(" " + b) for any a not ending
// in a space. Scoring relies on that composition property.
class Tokenizer {
 public:
  Tokenizer(std::vector<std::string> pieces, int bos_id, int mask_id);

  std::vector<int> encode(std::string_view text) const;
  const std::string& piece(int id) const { return pieces_[static_cast<size_t>(id)]; }
  int vocab_size() const { return static_cast<int>(pieces_.size()); }
  int bos_id() const { return bos_id_; }
  int mask_id() const { return mask_id_; }

  // Stable identity hash over the full piece inventory.
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> lookup_;  // matchable pieces only
  size_t max_piece_len_ = 0;
  int bos_id_;
  int mask_id_;
  std::string fingerprint_;
};

// Shared builtin vocabulary: byte fallback, the probe template words, and
// word stems covering the shipped lexicon. Constructed once, immutable.
const Tokenizer& builtin_tokenizer();

}  // namespace gaudit::tok
