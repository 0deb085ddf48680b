#ifndef FRAMEID_MODEL_HPP
#define FRAMEID_MODEL_HPP

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/graph.hpp"
#include "frameid/tensor.hpp"
#include "frameid/tokenizer.hpp"

namespace frameid {

// Window size used for the local attention head; 10 covers the context that
// typically decides a frame.
inline constexpr int kDefaultWindow = 10;

// Max sequence lengths used with the full FrameNet 1.5 / 1.7 releases; the
// toy default is 64.
inline constexpr int kSeqLenFrameNet15 = 260;
inline constexpr int kSeqLenFrameNet17 = 320;

enum class FilterMode { none, masked, literal };

inline FilterMode parse_filter_mode(std::string_view s) {
  if (s == "none") return FilterMode::none;
  if (s == "masked") return FilterMode::masked;
  if (s == "literal") return FilterMode::literal;
  throw ValidationError("unknown filter mode '" + std::string(s) + "'");
}

inline const char* filter_mode_name(FilterMode m) {
  switch (m) {
    case FilterMode::none: return "none";
    case FilterMode::masked: return "masked";
    case FilterMode::literal: return "literal";
  }
  return "?";
}

// Encoder hyperparameters. The reference configuration at full scale is
// 12 layers / 768 hidden / 12 heads; the defaults here are sized so that
// finite-difference checks and seconds-scale training stay practical.
struct EncoderConfig {
  int layers = 2;
  int d = 32;
  int heads = 4;
  int ffn_dim = 64;
  int vocab_size = 0;
  int n = 64;
  real_t dropout = 0.0;

  void validate() const {
    if (layers < 1 || d < 1 || heads < 1 || ffn_dim < 1 || vocab_size < 1 || n < 3)
      throw ValidationError("encoder config: all dimensions must be positive (n >= 3)");
    if (d % heads != 0) throw ValidationError("encoder config: d must be divisible by heads");
    if (dropout < 0 || dropout >= 1) throw ValidationError("encoder config: dropout must be in [0,1)");
  }
};

struct ModelParams {
  int k = 0;

  Parameter tok_emb, pos_emb, seg_emb;
  Parameter emb_ln_g, emb_ln_b;

  struct Layer {
    Parameter wq, bq, wk, bk, wv, bv, wo, bo;
    Parameter ln1_g, ln1_b;
    Parameter w1, b1, w2, b2;
    Parameter ln2_g, ln2_b;
  };
  std::vector<Layer> layers;

  Parameter w_c;  // (d x 2d) attentional combination
  Parameter w_s;  // (k x d) softmax layer, no-filter head
  Parameter w_k;  // (k x d) fully-connected layer of the filtered head
  Parameter w_f;  // (k x k) softmax layer over the filtered vector o

  // Declaration order; checkpoints, the optimizer and grad checks iterate this.
  std::vector<Parameter*> all() {
    std::vector<Parameter*> out{&tok_emb, &pos_emb, &seg_emb, &emb_ln_g, &emb_ln_b};
    for (Layer& l : layers) {
      for (Parameter* p : {&l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo, &l.bo,
                           &l.ln1_g, &l.ln1_b, &l.w1, &l.b1, &l.w2, &l.b2, &l.ln2_g, &l.ln2_b})
        out.push_back(p);
    }
    out.push_back(&w_c);
    out.push_back(&w_s);
    out.push_back(&w_k);
    out.push_back(&w_f);
    return out;
  }

  std::size_t parameter_count() {
    std::size_t total = 0;
    for (Parameter* p : all()) total += p->value.size();
    return total;
  }

  void zero_grads() {
    for (Parameter* p : all()) p->zero_grad();
  }
};

namespace detail {

inline Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  Tensor t(rows, cols);
  real_t bound = real_t(1) / std::sqrt(static_cast<real_t>(fan_in));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

inline Parameter linear(const std::string& name, std::size_t out, std::size_t in, Rng& rng) {
  return Parameter(name, uniform_init(out, in, in, rng));
}

inline Parameter zeros(const std::string& name, std::size_t rows, std::size_t cols) {
  return Parameter(name, Tensor(rows, cols));
}

inline Parameter ones_row(const std::string& name, std::size_t cols) {
  Tensor t(1, cols);
  t.fill(real_t(1));
  return Parameter(name, std::move(t));
}

}  // namespace detail

inline ModelParams init_model(const EncoderConfig& cfg, int k, std::uint64_t seed) {
  cfg.validate();
  if (k < 1) throw ValidationError("init_model: need at least one frame");
  Rng rng(seed);
  auto sz = [](int v) { return static_cast<std::size_t>(v); };

  ModelParams m;
  m.k = k;
  m.tok_emb = Parameter("tok_emb", detail::uniform_init(sz(cfg.vocab_size), sz(cfg.d), sz(cfg.d), rng));
  m.pos_emb = Parameter("pos_emb", detail::uniform_init(sz(cfg.n), sz(cfg.d), sz(cfg.d), rng));
  m.seg_emb = Parameter("seg_emb", detail::uniform_init(2, sz(cfg.d), sz(cfg.d), rng));
  m.emb_ln_g = detail::ones_row("emb_ln_g", sz(cfg.d));
  m.emb_ln_b = detail::zeros("emb_ln_b", 1, sz(cfg.d));

  for (int li = 0; li < cfg.layers; ++li) {
    std::string p = "layer" + std::to_string(li) + ".";
    ModelParams::Layer l;
    l.wq = detail::linear(p + "wq", sz(cfg.d), sz(cfg.d), rng);
    l.bq = detail::zeros(p + "bq", 1, sz(cfg.d));
    l.wk = detail::linear(p + "wk", sz(cfg.d), sz(cfg.d), rng);
    l.bk = detail::zeros(p + "bk", 1, sz(cfg.d));
    l.wv = detail::linear(p + "wv", sz(cfg.d), sz(cfg.d), rng);
    l.bv = detail::zeros(p + "bv", 1, sz(cfg.d));
    l.wo = detail::linear(p + "wo", sz(cfg.d), sz(cfg.d), rng);
    l.bo = detail::zeros(p + "bo", 1, sz(cfg.d));
    l.ln1_g = detail::ones_row(p + "ln1_g", sz(cfg.d));
    l.ln1_b = detail::zeros(p + "ln1_b", 1, sz(cfg.d));
    l.w1 = detail::linear(p + "ffn_w1", sz(cfg.ffn_dim), sz(cfg.d), rng);
    l.b1 = detail::zeros(p + "ffn_b1", 1, sz(cfg.ffn_dim));
    l.w2 = detail::linear(p + "ffn_w2", sz(cfg.d), sz(cfg.ffn_dim), rng);
    l.b2 = detail::zeros(p + "ffn_b2", 1, sz(cfg.d));
    l.ln2_g = detail::ones_row(p + "ln2_g", sz(cfg.d));
    l.ln2_b = detail::zeros(p + "ln2_b", 1, sz(cfg.d));
    m.layers.push_back(std::move(l));
  }

  m.w_c = detail::linear("w_c", sz(cfg.d), 2 * sz(cfg.d), rng);
  m.w_s = detail::linear("w_s", sz(k), sz(cfg.d), rng);
  m.w_k = detail::linear("w_k", sz(k), sz(cfg.d), rng);
  m.w_f = detail::linear("w_f", sz(k), sz(k), rng);
  return m;
}

// ---------------------------------------------------------------------------
// Forward pass pieces. All of them build onto a caller-owned graph so the
// same code path serves training (backward over the tape) and inference
// (read the values, drop the tape).
// ---------------------------------------------------------------------------

// Post-norm transformer encoder over one padded sequence; returns H (n x d).
// PAD positions are masked out of the self-attention keys.
inline Graph::NodeId encode(Graph& g, ModelParams& m, const EncoderConfig& cfg,
                            const std::vector<int>& token_ids, bool training = false,
                            Rng* dropout_rng = nullptr) {
  if (static_cast<int>(token_ids.size()) != cfg.n)
    throw ContractError("encode: token id sequence must have length n");
  for (int id : token_ids)
    if (id < 0 || id >= cfg.vocab_size) throw ContractError("encode: token id out of range");
  const bool drop = training && cfg.dropout > 0;
  if (drop && dropout_rng == nullptr) throw ContractError("encode: dropout requires an RNG");

  std::vector<std::uint8_t> key_valid(token_ids.size());
  for (std::size_t i = 0; i < token_ids.size(); ++i)
    key_valid[i] = token_ids[i] != Vocab::kPad ? 1 : 0;

  auto x = g.gather_rows(g.param(m.tok_emb), token_ids);
  x = g.add(x, g.param(m.pos_emb));
  x = g.add_row(x, g.gather_rows(g.param(m.seg_emb), {0}));
  x = g.layer_norm(x, g.param(m.emb_ln_g), g.param(m.emb_ln_b));
  if (drop) x = g.dropout(x, cfg.dropout, *dropout_rng);

  const int dh = cfg.d / cfg.heads;
  const real_t inv_sqrt_dh = real_t(1) / std::sqrt(static_cast<real_t>(dh));

  for (ModelParams::Layer& l : m.layers) {
    auto q = g.affine(x, l.wq, l.bq);
    auto kk = g.affine(x, l.wk, l.bk);
    auto v = g.affine(x, l.wv, l.bv);

    Graph::NodeId ctx = 0;
    for (int h = 0; h < cfg.heads; ++h) {
      auto qh = g.slice_cols(q, static_cast<std::size_t>(h * dh), static_cast<std::size_t>(dh));
      auto kh = g.slice_cols(kk, static_cast<std::size_t>(h * dh), static_cast<std::size_t>(dh));
      auto vh = g.slice_cols(v, static_cast<std::size_t>(h * dh), static_cast<std::size_t>(dh));
      auto scores = g.scale(g.matmul_nt(qh, kh), inv_sqrt_dh);
      auto attn = g.masked_softmax(scores, key_valid);
      if (drop) attn = g.dropout(attn, cfg.dropout, *dropout_rng);
      auto head = g.matmul(attn, vh);
      ctx = h == 0 ? head : g.concat_cols(ctx, head);
    }
    auto attn_out = g.affine(ctx, l.wo, l.bo);
    if (drop) attn_out = g.dropout(attn_out, cfg.dropout, *dropout_rng);
    x = g.layer_norm(g.add(x, attn_out), g.param(l.ln1_g), g.param(l.ln1_b));

    auto f = g.affine(g.gelu(g.affine(x, l.w1, l.b1)), l.w2, l.b2);
    if (drop) f = g.dropout(f, cfg.dropout, *dropout_rng);
    x = g.layer_norm(g.add(x, f), g.param(l.ln2_g), g.param(l.ln2_b));
  }
  return x;
}

// t = H^T p: the sum of hidden states at target positions, as a 1 x d row.
inline Graph::NodeId target_vector(Graph& g, Graph::NodeId H, const std::vector<std::uint8_t>& p) {
  const Tensor& hv = g.value(H);
  if (p.size() != hv.rows()) throw ContractError("target_vector: position vector length mismatch");
  bool any = false;
  Tensor pr(1, p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    pr[i] = p[i] ? real_t(1) : real_t(0);
    any = any || p[i];
  }
  if (!any) throw ContractError("target_vector: position vector has no target positions");
  return g.matmul(g.input(std::move(pr)), H);
}

// Local attention over the window [beta1, beta2] (1-based, inclusive):
// alignment scores h_i . t, softmax inside the window, zeros outside, and
// the context vector c = H^T alpha. Returns (c, alpha).
inline std::pair<Graph::NodeId, Graph::NodeId> attend(Graph& g, Graph::NodeId H, Graph::NodeId t,
                                                      int beta1, int beta2) {
  const Tensor& hv = g.value(H);
  const int n = static_cast<int>(hv.rows());
  if (!(1 <= beta1 && beta1 <= beta2 && beta2 <= n)) throw ContractError("attend: bad window bounds");
  std::vector<std::uint8_t> window(static_cast<std::size_t>(n), 0);
  for (int i = beta1; i <= beta2; ++i) window[static_cast<std::size_t>(i - 1)] = 1;
  auto scores = g.matmul_nt(t, H);                    // 1 x n
  auto alpha = g.masked_softmax(scores, std::move(window));
  auto c = g.matmul(alpha, H);                        // 1 x d
  return {c, alpha};
}

// h~ = tanh(W_c [c; t])
inline Graph::NodeId attentional_state(Graph& g, Graph::NodeId c, Graph::NodeId t, Parameter& w_c) {
  return g.tanh_act(g.affine(g.concat_cols(c, t), w_c));
}

struct FramePrediction {
  Tensor y;                      // k-dim probability vector (1 x k)
  int predicted = -1;            // argmax, lowest id wins ties
  std::vector<std::uint8_t> v;   // candidate mask used (all ones in no-filter mode)
  Tensor alpha;                  // alignment vector (1 x n), diagnostic
};

// Frame probability head. Three behaviours over the shared filtered vector
// o = (W_k h~) (.) v and its softmax layer W_f (k x k):
//   none    - y = softmax(W_s h~) over all k frames, W_s (k x d).
//   masked  - y = masked_softmax(W_f o, v): the candidate mask is applied to
//             the activations and again to the final normalization, so y is
//             exactly 0 off-candidate and sums to 1 over candidates.
//   literal - y = softmax(W_f o): the element-wise mask alone, after which
//             the full softmax leaves non-candidates with nonzero
//             probability. That discrepancy is deliberate and documented.
inline Graph::NodeId predict_probs(Graph& g, Graph::NodeId htilde, ModelParams& m,
                                   const std::vector<std::uint8_t>& v, FilterMode mode) {
  if (mode == FilterMode::none) return g.softmax(g.affine(htilde, m.w_s));
  if (v.size() != static_cast<std::size_t>(m.k))
    throw ContractError("predict: candidate mask length must be k");
  bool any = false;
  for (auto b : v) any = any || b;
  if (!any) throw ContractError("predict: candidate mask has no candidates");
  auto o = g.mask_columns(g.affine(htilde, m.w_k), v);
  auto logits = g.affine(o, m.w_f);
  return mode == FilterMode::masked ? g.masked_softmax(logits, v) : g.softmax(logits);
}

inline int argmax_frame(const Tensor& y, const std::vector<std::uint8_t>& v, FilterMode mode) {
  int best = -1;
  real_t best_p = -std::numeric_limits<real_t>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (mode != FilterMode::none && !v[i]) continue;  // argmax over candidates only
    if (y[i] > best_p) {
      best_p = y[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Head-only prediction from an attentional state; alpha stays empty here and
// is filled by the full forward().
inline FramePrediction predict(Graph& g, Graph::NodeId htilde, ModelParams& m,
                               std::vector<std::uint8_t> v, FilterMode mode) {
  if (mode == FilterMode::none) v.assign(static_cast<std::size_t>(m.k), 1);
  auto y = predict_probs(g, htilde, m, v, mode);
  FramePrediction out;
  out.y = g.value(y);
  out.predicted = argmax_frame(out.y, v, mode);
  out.v = std::move(v);
  return out;
}

// Full pipeline: encode -> target vector -> windowed attention -> attentional
// state -> prediction head.
struct ForwardNodes {
  Graph::NodeId H, t, c, alpha, htilde, y;
};

inline ForwardNodes build_forward(Graph& g, ModelParams& m, const EncoderConfig& cfg,
                                  const TokenizedInstance& inst, const std::vector<std::uint8_t>& v,
                                  FilterMode mode, bool training = false, Rng* dropout_rng = nullptr) {
  ForwardNodes nodes;
  nodes.H = encode(g, m, cfg, inst.token_ids, training, dropout_rng);
  nodes.t = target_vector(g, nodes.H, inst.position);
  auto [c, alpha] = attend(g, nodes.H, nodes.t, inst.beta1, inst.beta2);
  nodes.c = c;
  nodes.alpha = alpha;
  nodes.htilde = attentional_state(g, nodes.c, nodes.t, m.w_c);
  nodes.y = predict_probs(g, nodes.htilde, m, v, mode);
  return nodes;
}

// Deterministic eval-mode forward (dropout off).
inline FramePrediction forward(ModelParams& m, const EncoderConfig& cfg,
                               const TokenizedInstance& inst, std::vector<std::uint8_t> v,
                               FilterMode mode) {
  Graph g;
  if (mode == FilterMode::none) v.assign(static_cast<std::size_t>(m.k), 1);
  ForwardNodes nodes = build_forward(g, m, cfg, inst, v, mode, false, nullptr);
  FramePrediction out;
  out.y = g.value(nodes.y);
  out.alpha = g.value(nodes.alpha);
  out.predicted = argmax_frame(out.y, v, mode);
  out.v = std::move(v);
  return out;
}

}  // namespace frameid

#endif  // FRAMEID_MODEL_HPP
