#include "gaudit/nn.hpp"

#include <cmath>
#include <random>

#include "gaudit/errors.hpp"
#include "gaudit/kernels.hpp"
#include "gaudit/util.hpp"

namespace gaudit::nn {

std::string_view to_string(Arch a) {
  switch (a) {
    case Arch::autoregressive: return "autoregressive";
    case Arch::masked: return "masked";
    case Arch::encoder_decoder: return "encoder_decoder";
  }
  return "";
}

namespace {

// Box-Muller over mt19937_64 so the weight stream is identical on every
// platform (std::normal_distribution is not pinned by the standard).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double next(double scale) {
    const double u1 = uniform_open();
    const double u2 = uniform_half_open();
    return scale * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793 * u2);
  }

 private:
  double uniform_open() {  // (0, 1]
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }
  double uniform_half_open() {  // [0, 1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  std::mt19937_64 rng_;
};

constexpr double kInitScale = 0.02;

void fill_normal(std::vector<double>& v, std::size_t n, NormalSampler& rng) {
  v.resize(n);
  for (auto& x : v) x = rng.next(kInitScale);
}

void fill_const(std::vector<double>& v, std::size_t n, double value) {
  v.assign(n, value);
}

}  // namespace

TinyLanguageModel::TinyLanguageModel(Arch arch, TransformerConfig cfg,
                                     const tok::Tokenizer& tokenizer)
    : arch_(arch), cfg_(cfg), tokenizer_(&tokenizer) {
  if (cfg_.d_model % cfg_.heads != 0)
    throw ConfigError("nn: d_model " + std::to_string(cfg_.d_model) +
                      " not divisible by heads " + std::to_string(cfg_.heads));
  const auto d = static_cast<std::size_t>(cfg_.d_model);
  const auto ff = static_cast<std::size_t>(cfg_.d_ff);
  const auto vocab = static_cast<std::size_t>(tokenizer.vocab_size());
  const auto max_seq = static_cast<std::size_t>(cfg_.max_seq);
  NormalSampler rng(cfg_.seed);

  auto init_attention = [&](Attention& a) {
    fill_const(a.ln_g, d, 1.0);
    fill_const(a.ln_b, d, 0.0);
    fill_normal(a.wq, d * d, rng);
    fill_normal(a.wk, d * d, rng);
    fill_normal(a.wv, d * d, rng);
    fill_normal(a.wo, d * d, rng);
    fill_const(a.bq, d, 0.0);
    fill_const(a.bk, d, 0.0);
    fill_const(a.bv, d, 0.0);
    fill_const(a.bo, d, 0.0);
  };
  auto init_ff = [&](FeedForward& f) {
    fill_const(f.ln_g, d, 1.0);
    fill_const(f.ln_b, d, 0.0);
    fill_normal(f.w1, d * ff, rng);
    fill_const(f.b1, ff, 0.0);
    fill_normal(f.w2, ff * d, rng);
    fill_const(f.b2, d, 0.0);
  };
  auto init_stack = [&](StackWeights& s, bool with_cross) {
    fill_normal(s.pos_emb, max_seq * d, rng);
    s.blocks.resize(static_cast<std::size_t>(cfg_.layers));
    for (auto& b : s.blocks) {
      init_attention(b.self_attn);
      if (with_cross) init_attention(b.cross_attn);
      init_ff(b.ff);
    }
    fill_const(s.lnf_g, d, 1.0);
    fill_const(s.lnf_b, d, 0.0);
  };

  fill_normal(tok_emb_, vocab * d, rng);
  init_stack(encoder_, false);
  if (arch_ == Arch::encoder_decoder) init_stack(decoder_, true);

  auto attn_params = [&] { return 2 * d + 4 * d * d + 4 * d; };
  auto ff_params = [&] { return 2 * d + d * ff + ff + ff * d + d; };
  std::size_t count = vocab * d;
  auto stack_params = [&](bool with_cross) {
    std::size_t per_block = attn_params() + ff_params();
    if (with_cross) per_block += attn_params();
    return max_seq * d + per_block * static_cast<std::size_t>(cfg_.layers) + 2 * d;
  };
  count += stack_params(false);
  if (arch_ == Arch::encoder_decoder) count += stack_params(true);
  parameter_count_ = static_cast<std::int64_t>(count);
}

void TinyLanguageModel::attend(const Attention& w, const std::vector<double>& x,
                               std::size_t n, const std::vector<double>& kv_src,
                               std::size_t kv_len, bool causal,
                               std::vector<double>& out) const {
  const auto d = static_cast<std::size_t>(cfg_.d_model);
  const auto heads = static_cast<std::size_t>(cfg_.heads);
  const std::size_t dh = d / heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  std::vector<double> normed(n * d);
  kernels::layer_norm_rows(x, w.ln_g, w.ln_b, normed, n, d);
  // cross-attention memory arrives already normalized by the encoder's final LN
  const std::span<const double> kv_in =
      (&kv_src == &x) ? std::span<const double>(normed) : std::span<const double>(kv_src);

  std::vector<double> q(n * d), k(kv_len * d), v(kv_len * d);
  kernels::gemm(normed, w.wq, q, n, d, d);
  kernels::add_bias_rows(q, w.bq, n, d);
  kernels::gemm(kv_in, w.wk, k, kv_len, d, d);
  kernels::add_bias_rows(k, w.bk, kv_len, d);
  kernels::gemm(kv_in, w.wv, v, kv_len, d, d);
  kernels::add_bias_rows(v, w.bv, kv_len, d);

  std::vector<double> ctx(n * d, 0.0);
  std::vector<double> scores(kv_len);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dh;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t limit = causal ? i + 1 : kv_len;
      for (std::size_t j = 0; j < limit; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < dh; ++c)
          dot += q[i * d + off + c] * k[j * d + off + c];
        scores[j] = dot * inv_sqrt_dh;
      }
      kernels::softmax_row(std::span<double>(scores.data(), limit));
      for (std::size_t j = 0; j < limit; ++j) {
        const double p = scores[j];
        for (std::size_t c = 0; c < dh; ++c)
          ctx[i * d + off + c] += p * v[j * d + off + c];
      }
    }
  }

  out.resize(n * d);
  kernels::gemm(ctx, w.wo, out, n, d, d);
  kernels::add_bias_rows(out, w.bo, n, d);
}

std::vector<double> TinyLanguageModel::run_stack(const StackWeights& stack,
                                                 const std::vector<int>& ids,
                                                 bool causal, bool with_cross,
                                                 const std::vector<double>& memory,
                                                 std::size_t memory_len) const {
  const auto d = static_cast<std::size_t>(cfg_.d_model);
  const auto ff = static_cast<std::size_t>(cfg_.d_ff);
  const std::size_t n = ids.size();
  if (n > static_cast<std::size_t>(cfg_.max_seq))
    throw ConfigError("nn: sequence length " + std::to_string(n) + " exceeds max_seq " +
                      std::to_string(cfg_.max_seq));

  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::size_t>(ids[i]);
    for (std::size_t c = 0; c < d; ++c)
      x[i * d + c] = tok_emb_[id * d + c] + stack.pos_emb[i * d + c];
  }

  std::vector<double> attn_out, normed(n * d), inner(n * ff), ff_out(n * d);
  for (const auto& block : stack.blocks) {
    attend(block.self_attn, x, n, x, n, causal, attn_out);
    for (std::size_t i = 0; i < n * d; ++i) x[i] += attn_out[i];
    if (with_cross) {
      attend(block.cross_attn, x, n, memory, memory_len, false, attn_out);
      for (std::size_t i = 0; i < n * d; ++i) x[i] += attn_out[i];
    }
    kernels::layer_norm_rows(x, block.ff.ln_g, block.ff.ln_b, normed, n, d);
    kernels::gemm(normed, block.ff.w1, inner, n, d, ff);
    kernels::add_bias_rows(inner, block.ff.b1, n, ff);
    kernels::gelu(inner);
    kernels::gemm(inner, block.ff.w2, ff_out, n, ff, d);
    kernels::add_bias_rows(ff_out, block.ff.b2, n, d);
    for (std::size_t i = 0; i < n * d; ++i) x[i] += ff_out[i];
  }

  std::vector<double> out(n * d);
  kernels::layer_norm_rows(x, stack.lnf_g, stack.lnf_b, out, n, d);
  return out;
}

std::vector<double> TinyLanguageModel::readout(const std::vector<double>& hidden,
                                               std::size_t n,
                                               const std::vector<std::size_t>& positions,
                                               const std::vector<int>& gold) const {
  const auto d = static_cast<std::size_t>(cfg_.d_model);
  const auto vocab = static_cast<std::size_t>(tokenizer_->vocab_size());
  const std::size_t k = positions.size();
  std::vector<double> rows(k * d);
  for (std::size_t i = 0; i < k; ++i) {
    if (positions[i] >= n)
      throw ConfigError("nn: readout position out of range");
    for (std::size_t c = 0; c < d; ++c) rows[i * d + c] = hidden[positions[i] * d + c];
  }
  std::vector<double> logits(k * vocab);
  kernels::gemm_nt(rows, tok_emb_, logits, k, d, vocab);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::span<double> lrow(logits.data() + i * vocab, vocab);
    kernels::log_softmax_row(lrow, lrow);
    out[i] = lrow[static_cast<std::size_t>(gold[i])];
  }
  return out;
}

std::vector<double> TinyLanguageModel::score_autoregressive(
    const std::vector<int>& context_ids, const std::vector<int>& completion_ids) const {
  std::vector<int> ids;
  ids.reserve(1 + context_ids.size() + completion_ids.size());
  ids.push_back(tokenizer_->bos_id());
  ids.insert(ids.end(), context_ids.begin(), context_ids.end());
  ids.insert(ids.end(), completion_ids.begin(), completion_ids.end());

  const std::vector<double> hidden = run_stack(encoder_, ids, true, false, {}, 0);
  std::vector<std::size_t> positions(completion_ids.size());
  const std::size_t first = context_ids.size();  // predicts ids[first + 1]
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = first + i;
  return readout(hidden, ids.size(), positions, completion_ids);
}

std::vector<double> TinyLanguageModel::score_masked(const std::vector<int>& context_ids,
                                                    const std::vector<int>& completion_ids,
                                                    bool iterative) const {
  const std::size_t k = completion_ids.size();
  std::vector<int> ids;
  ids.reserve(1 + context_ids.size() + k);
  ids.push_back(tokenizer_->bos_id());
  ids.insert(ids.end(), context_ids.begin(), context_ids.end());
  const std::size_t slot0 = ids.size();
  for (std::size_t i = 0; i < k; ++i) ids.push_back(tokenizer_->mask_id());

  std::vector<double> out(k);
  if (!iterative) {
    const std::vector<double> hidden = run_stack(encoder_, ids, false, false, {}, 0);
    std::vector<std::size_t> positions(k);
    for (std::size_t i = 0; i < k; ++i) positions[i] = slot0 + i;
    return readout(hidden, ids.size(), positions, completion_ids);
  }
  for (std::size_t t = 0; t < k; ++t) {
    const std::vector<double> hidden = run_stack(encoder_, ids, false, false, {}, 0);
    out[t] = readout(hidden, ids.size(), {slot0 + t}, {completion_ids[t]})[0];
    ids[slot0 + t] = completion_ids[t];  // unmask for the next pass
  }
  return out;
}

std::vector<double> TinyLanguageModel::score_encoder_decoder(
    const std::vector<int>& context_ids, const std::vector<int>& completion_ids) const {
  const std::vector<double> memory =
      run_stack(encoder_, context_ids, false, false, {}, 0);
  std::vector<int> dec_ids;
  dec_ids.reserve(1 + completion_ids.size());
  dec_ids.push_back(tokenizer_->bos_id());
  dec_ids.insert(dec_ids.end(), completion_ids.begin(), completion_ids.end());

  const std::vector<double> hidden =
      run_stack(decoder_, dec_ids, true, true, memory, context_ids.size());
  std::vector<std::size_t> positions(completion_ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  return readout(hidden, dec_ids.size(), positions, completion_ids);
}

const std::vector<NativePreset>& native_presets() {
  static const std::vector<NativePreset> presets = [] {
    std::vector<NativePreset> v;
    auto make = [&](std::string id, Arch arch, int layers, int d, int heads, int ff) {
      TransformerConfig cfg;
      cfg.layers = layers;
      cfg.d_model = d;
      cfg.heads = heads;
      cfg.d_ff = ff;
      cfg.seed = util::fnv1a64(id);
      v.push_back({std::move(id), arch, cfg});
    };
    make("tiny-ar-small", Arch::autoregressive, 2, 64, 4, 256);
    make("tiny-ar-medium", Arch::autoregressive, 4, 96, 6, 384);
    make("tiny-ar-large", Arch::autoregressive, 6, 128, 8, 512);
    make("tiny-masked-small", Arch::masked, 2, 64, 4, 256);
    make("tiny-encdec-small", Arch::encoder_decoder, 2, 64, 4, 256);
    return v;
  }();
  return presets;
}

const NativePreset* find_native_preset(std::string_view model_id) {
  for (const auto& p : native_presets())
    if (p.model_id == model_id) return &p;
  return nullptr;
}

}  // namespace gaudit::nn
