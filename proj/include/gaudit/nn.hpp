#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaudit/tokenizer.hpp"

namespace gaudit::nn {

enum class Arch { autoregressive, masked, encoder_decoder };

std::string_view to_string(Arch a);

struct TransformerConfig {
  int layers = 2;
  int d_model = 64;
  int heads = 4;
  int d_ff = 256;
  int max_seq = 128;
  std::uint64_t seed = 1;
};

// Pre-LN transformer with learned positions, tied unembedding, and weights
// drawn N(0, 0.02) from a fixed generation order, so a (config, seed) pair
// names one reproducible model. Forward passes are pure; instances are
// immutable after construction and safe to share across threads.
class TinyLanguageModel {
 public:
  TinyLanguageModel(Arch arch, TransformerConfig cfg, const tok::Tokenizer& tokenizer);

  Arch arch() const { return arch_; }
  const TransformerConfig& config() const { return cfg_; }
  const tok::Tokenizer& tokenizer() const { return *tokenizer_; }
  std::int64_t parameter_count() const { return parameter_count_; }

  // Per-token natural-log probabilities of the completion ids.
  // Autoregressive: causal conditioning on context + previous completion ids.
  std::vector<double> score_autoregressive(const std::vector<int>& context_ids,
                                           const std::vector<int>& completion_ids) const;
  // Masked: one mask slot per completion id after the context; single pass
  // scores all slots independently, iterative unmasks left to right.
  std::vector<double> score_masked(const std::vector<int>& context_ids,
                                   const std::vector<int>& completion_ids,
                                   bool iterative) const;
  // Encoder-decoder: context through the encoder, completion teacher-forced
  // through the decoder behind a BOS.
  std::vector<double> score_encoder_decoder(const std::vector<int>& context_ids,
                                            const std::vector<int>& completion_ids) const;

 private:
  struct Attention {
    std::vector<double> ln_g, ln_b;
    std::vector<double> wq, wk, wv, wo;  // each d*d, row-major, out = x*W
    std::vector<double> bq, bk, bv, bo;
  };
  struct FeedForward {
    std::vector<double> ln_g, ln_b;
    std::vector<double> w1, b1;  // d*ff, ff
    std::vector<double> w2, b2;  // ff*d, d
  };
  struct Block {
    Attention self_attn;
    Attention cross_attn;  // decoder blocks only
    FeedForward ff;
  };
  struct StackWeights {
    std::vector<Block> blocks;
    std::vector<double> pos_emb;  // max_seq*d
    std::vector<double> lnf_g, lnf_b;
  };

  std::vector<double> run_stack(const StackWeights& stack, const std::vector<int>& ids,
                                bool causal, bool with_cross,
                                const std::vector<double>& memory,
                                std::size_t memory_len) const;
  void attend(const Attention& w, const std::vector<double>& x, std::size_t n,
              const std::vector<double>& kv_src, std::size_t kv_len, bool causal,
              std::vector<double>& out) const;
  // Natural-log probability of gold ids at selected hidden rows.
  std::vector<double> readout(const std::vector<double>& hidden, std::size_t n,
                              const std::vector<std::size_t>& positions,
                              const std::vector<int>& gold) const;

  Arch arch_;
  TransformerConfig cfg_;
  const tok::Tokenizer* tokenizer_;
  std::vector<double> tok_emb_;  // vocab*d, also the unembedding
  StackWeights encoder_;         // the only stack for ar/masked
  StackWeights decoder_;         // encoder_decoder only
  std::int64_t parameter_count_ = 0;
};

struct NativePreset {
  std::string model_id;
  Arch arch;
  TransformerConfig cfg;
};

// The shipped model zoo: three autoregressive sizes, one masked, one
// encoder-decoder. Seeds derive from the model id.
const std::vector<NativePreset>& native_presets();
const NativePreset* find_native_preset(std::string_view model_id);

}  // namespace gaudit::nn
